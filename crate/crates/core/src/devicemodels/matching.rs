//! L-section matching network seen from the mixer: shunt Cm in parallel with
//! series Lm feeding the source resistance rm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchingNetwork {
    /// ohm
    pub rm: f64,
    /// H
    pub lm: f64,
    /// F
    pub cm: f64,
}

impl Default for MatchingNetwork {
    fn default() -> Self {
        Self { rm: 50.0, lm: 180e-9, cm: 2e-12 }
    }
}

impl MatchingNetwork {
    pub fn impedance(&self, freq: f64) -> Result<Complex64> {
        matching_transform(self.rm, self.lm, self.cm, freq)
    }
}

/// Z = 1 / (j w Cm + 1/(rm + j w Lm)).
pub fn matching_transform(rm: f64, lm: f64, cm: f64, freq: f64) -> Result<Complex64> {
    ensure_positive("matching.rm", rm)?;
    for (field, v) in [("matching.lm", lm), ("matching.cm", cm), ("freq", freq)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::domain(field, format!("must be non-negative, got {v}")));
        }
    }
    let w = 2.0 * PI * freq;
    let series = Complex64::new(rm, w * lm);
    Ok(1.0 / (Complex64::new(0.0, w * cm) + 1.0 / series))
}
