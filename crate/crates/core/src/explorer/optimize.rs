//! Exhaustive minimum-power search and the energy-per-bit curve.

use serde::{Deserialize, Serialize};

use super::sweep::{sweep, SweepSpec};
use super::{required_output_snr, Breakdown, DesignMetrics, DesignPoint, ExplorerSettings};
use crate::error::{ensure_positive, Error, Result};
use crate::linkbudget::sensitivity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    /// dBm; the design must reach this or better.
    pub sensitivity: f64,
    /// bit/s
    pub data_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Optimum {
    Feasible { point: DesignPoint, metrics: DesignMetrics },
    /// Nothing met the targets; the closest evaluated point, if any evaluated at all.
    Infeasible { closest: Option<(DesignPoint, DesignMetrics)>, shortfall: Option<f64> },
}

impl Optimum {
    pub fn feasible(&self) -> Option<(&DesignPoint, &DesignMetrics)> {
        match self {
            Optimum::Feasible { point, metrics } => Some((point, metrics)),
            Optimum::Infeasible { .. } => None,
        }
    }
}

/// Reference targets matching the two compliance corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    MedradioCompliant,
    HighRate,
}

impl Preset {
    pub fn targets(self) -> Targets {
        match self {
            Preset::MedradioCompliant => Targets { sensitivity: -83.0, data_rate: 300e3 },
            Preset::HighRate => Targets { sensitivity: -70.0, data_rate: 10e6 },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::MedradioCompliant => "medradio-compliant",
            Preset::HighRate => "high-rate",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "medradio-compliant" => Ok(Preset::MedradioCompliant),
            "high-rate" => Ok(Preset::HighRate),
            other => Err(Error::domain("preset", format!("unknown preset {other:?}"))),
        }
    }
}

const SENSITIVITY_SLACK: f64 = 1e-9;

/// Grid search for the feasible point of least total power at the target
/// rate. Any `data_rate` axis in `space` is replaced by the target rate.
pub fn optimize_min_power(targets: Targets, space: &SweepSpec, settings: &ExplorerSettings) -> Result<Optimum> {
    ensure_positive("data_rate", targets.data_rate)?;
    if !targets.sensitivity.is_finite() {
        return Err(Error::domain("sensitivity", "target must be finite"));
    }
    let mut spec = space.clone();
    spec.axes.retain(|a| a.path != "data_rate");
    spec.fixed.data_rate = targets.data_rate;
    let rows = if spec.axes.is_empty() {
        let metrics = super::evaluate_design(&spec.fixed, settings);
        vec![super::SweepRow { coordinates: vec![], point: spec.fixed, metrics }]
    } else {
        sweep(&spec, settings)?
    };

    let mut best: Option<(&DesignPoint, &DesignMetrics)> = None;
    let mut nearest: Option<(&DesignPoint, &DesignMetrics, f64)> = None;
    for row in &rows {
        let Ok(m) = &row.metrics else { continue };
        let shortfall = (m.sensitivity - targets.sensitivity).max(0.0);
        if m.feasible && shortfall <= SENSITIVITY_SLACK {
            if best.is_none_or(|(_, b)| m.total_power < b.total_power) {
                best = Some((&row.point, m));
            }
        } else {
            // bandwidth failures rank behind every bandwidth-feasible miss
            let key = shortfall + if m.feasible { 0.0 } else { 1e6 };
            let better = match nearest {
                None => true,
                Some((_, n, k)) => key < k || (key == k && m.total_power < n.total_power),
            };
            if better {
                nearest = Some((&row.point, m, key));
            }
        }
    }
    Ok(match (best, nearest) {
        (Some((p, m)), _) => Optimum::Feasible { point: *p, metrics: m.clone() },
        (None, Some((p, m, _))) => Optimum::Infeasible {
            closest: Some((*p, m.clone())),
            shortfall: Some(m.sensitivity - targets.sensitivity),
        },
        (None, None) => Optimum::Infeasible { closest: None, shortfall: None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rate: f64,
    /// Sensitivity target at this rate, dBm.
    pub target: f64,
    pub optimum: Optimum,
}

impl CurvePoint {
    pub fn energy_per_bit(&self) -> Option<f64> {
        self.optimum.feasible().map(|(_, m)| m.energy_per_bit)
    }

    pub fn breakdown(&self) -> Option<Breakdown> {
        self.optimum.feasible().map(|(_, m)| m.breakdown)
    }
}

/// Sensitivity target at `rate`: the thermal floor over a rate-wide band
/// plus the required SNR and the configured NF budget.
pub fn relaxed_target(rate: f64, space: &SweepSpec, settings: &ExplorerSettings) -> Result<f64> {
    let snr_o = required_output_snr(&space.fixed.link, rate)?;
    Ok(sensitivity(rate, snr_o, settings.nf_budget)?.sensitivity + settings.implementation_loss)
}

pub fn energy_per_bit_curve(rates: &[f64], space: &SweepSpec, settings: &ExplorerSettings) -> Result<Vec<CurvePoint>> {
    if rates.is_empty() {
        return Err(Error::domain("rates", "need at least one rate"));
    }
    for &r in rates {
        ensure_positive("rates", r)?;
    }
    if rates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("rates", "must be strictly increasing"));
    }
    rates
        .iter()
        .map(|&rate| {
            let target = relaxed_target(rate, space, settings)?;
            let optimum = optimize_min_power(Targets { sensitivity: target, data_rate: rate }, space, settings)?;
            Ok(CurvePoint { rate, target, optimum })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::sweep::Axis;
    use crate::explorer::{evaluate_design, power_breakdown_report};

    #[test]
    fn compliant_point_is_sub_50uw_and_sub_100pj() {
        let s = ExplorerSettings::default();
        let opt = optimize_min_power(Preset::MedradioCompliant.targets(), &SweepSpec::default(), &s).unwrap();
        let (p, m) = opt.feasible().expect("feasible");
        assert!(m.total_power < 50e-6, "{}", m.total_power);
        assert!(m.energy_per_bit < 100e-12);
        assert!(m.sensitivity <= -83.0);
        let br = power_breakdown_report(p, &s).unwrap();
        assert!(br.fractions.divider_nlo > 0.5, "{:?}", br.fractions);
    }

    #[test]
    fn high_rate_point_under_5pj() {
        let s = ExplorerSettings::default();
        let opt = optimize_min_power(Preset::HighRate.targets(), &SweepSpec::default(), &s).unwrap();
        let (_, m) = opt.feasible().expect("feasible");
        assert!(m.energy_per_bit < 5e-12, "{}", m.energy_per_bit);
    }

    #[test]
    fn impossible_target_reports_near_miss() {
        let s = ExplorerSettings::default();
        let opt = optimize_min_power(Targets { sensitivity: -200.0, data_rate: 300e3 }, &SweepSpec::default(), &s).unwrap();
        match opt {
            Optimum::Infeasible { closest: Some((_, m)), shortfall: Some(d) } => {
                assert!(d > 0.0);
                assert!((m.sensitivity + 200.0 - d).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_point_space() {
        let s = ExplorerSettings::default();
        let spec = SweepSpec {
            axes: vec![Axis::new("lna.width_total", [12e-6])],
            ..Default::default()
        };
        let opt = optimize_min_power(Targets { sensitivity: -60.0, data_rate: 300e3 }, &spec, &s).unwrap();
        let (p, m) = opt.feasible().unwrap();
        assert_eq!(p.lna.total_width(), 12e-6);
        assert_eq!(*m, evaluate_design(p, &s).unwrap());
    }

    #[test]
    fn energy_curve_shape() {
        let s = ExplorerSettings::default();
        let rates = [10e3, 30e3, 100e3, 300e3, 1e6, 3e6, 10e6];
        let curve = energy_per_bit_curve(&rates, &SweepSpec::default(), &s).unwrap();
        let e: Vec<f64> = curve.iter().map(|c| c.energy_per_bit().unwrap()).collect();
        let argmin = (0..e.len()).min_by(|&a, &b| e[a].partial_cmp(&e[b]).unwrap()).unwrap();
        assert_ne!(argmin, 0);
        // divider power is rate independent, so low rates pay it per bit
        assert!(e[0] > e[1]);
        let single = energy_per_bit_curve(&rates[3..4], &SweepSpec::default(), &s).unwrap();
        let direct = optimize_min_power(
            Targets { sensitivity: single[0].target, data_rate: 300e3 },
            &SweepSpec::default(),
            &s,
        )
        .unwrap();
        assert_eq!(single[0].optimum, direct);
        assert!(energy_per_bit_curve(&[3.0, 1.0], &SweepSpec::default(), &s).is_err());
    }
}
