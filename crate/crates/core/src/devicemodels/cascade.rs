//! Friis cascade.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{db_from_ratio, ratio_from_db};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    /// dB
    pub nf: f64,
    /// Available power gain, dB.
    pub gain: f64,
}

impl Stage {
    pub fn new(nf: f64, gain: f64) -> Self {
        Self { nf, gain }
    }
}

/// Cascaded noise figure in dB.
pub fn cascade_nf(stages: &[Stage]) -> Result<f64> {
    if stages.is_empty() {
        return Err(Error::domain("stages", "need at least one stage"));
    }
    let mut f = 0.0;
    let mut gain = 1.0;
    for (i, s) in stages.iter().enumerate() {
        if !(s.nf >= 0.0) || s.gain.is_nan() {
            return Err(Error::domain("stages", format!("stage {i} has nf {} gain {}", s.nf, s.gain)));
        }
        let fi = ratio_from_db(s.nf);
        f += if i == 0 { fi } else { (fi - 1.0) / gain };
        gain *= ratio_from_db(s.gain);
    }
    Ok(db_from_ratio(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((cascade_nf(&[Stage::new(3.0, 20.0)]).unwrap() - 3.0).abs() < 1e-12);
        let two = cascade_nf(&[Stage::new(4.10, -3.92), Stage::new(3.01, 0.0)]).unwrap();
        assert!((two - 7.0209386956243645).abs() < 1e-9);
        let ideal = cascade_nf(&[Stage::new(5.0, f64::INFINITY), Stage::new(20.0, 0.0)]).unwrap();
        assert!((ideal - 5.0).abs() < 1e-12);
        assert!(cascade_nf(&[]).is_err());
    }

    #[test]
    fn adding_a_stage_never_lowers_nf() {
        let base = [Stage::new(4.0, 3.0)];
        let a = cascade_nf(&base).unwrap();
        let b = cascade_nf(&[base[0], Stage::new(0.5, 0.0)]).unwrap();
        assert!(b >= a);
        assert!(b >= 4.0);
    }

    #[test]
    fn order_matters() {
        let a = Stage::new(4.1, -3.92);
        let b = Stage::new(3.01, 12.0);
        assert!((cascade_nf(&[a, b]).unwrap() - cascade_nf(&[b, a]).unwrap()).abs() > 0.1);
    }
}
