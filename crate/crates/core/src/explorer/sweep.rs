//! Cartesian sweeps over design-point parameters and Pareto extraction.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_design, DesignMetrics, DesignPoint, ExplorerSettings};
use crate::devicemodels::Feedback;
use crate::error::{Error, Result};

/// Parameter paths accepted by [`Axis`].
pub const AXIS_PATHS: [&str; 20] = [
    "lna.width_p",
    "lna.width_n",
    "lna.width_total",
    "lna.gate_bias",
    "lna.supply",
    "lna.zin_target",
    "lna.feedback",
    "lna.load_cap",
    "mixer.n_paths",
    "mixer.duty",
    "mixer.switch_width",
    "mixer.baseband_cap",
    "mixer.lo_freq",
    "mixer.supply",
    "matching.rm",
    "matching.lm",
    "matching.cm",
    "link.distance",
    "link.ber_target",
    "data_rate",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: &str, values: impl Into<Vec<f64>>) -> Self {
        Self { path: path.to_string(), values: values.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub key: String,
    pub direction: Direction,
}

impl Objective {
    pub fn minimize(key: &str) -> Self {
        Self { key: key.to_string(), direction: Direction::Minimize }
    }

    pub fn maximize(key: &str) -> Self {
        Self { key: key.to_string(), direction: Direction::Maximize }
    }

    /// Metric value oriented so that smaller is better.
    fn cost(&self, m: &DesignMetrics) -> Result<f64> {
        let v = m.metric(&self.key)?;
        Ok(match self.direction {
            Direction::Minimize => v,
            Direction::Maximize => -v,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub fixed: DesignPoint,
    pub objectives: Vec<Objective>,
}

impl Default for SweepSpec {
    /// The calibrated design space: three gate biases, LNA widths and switch widths.
    fn default() -> Self {
        let lna_widths = [1e-6, 1.5e-6, 2e-6, 3e-6, 4e-6, 6e-6, 8e-6, 12e-6, 16e-6, 24e-6, 32e-6];
        let switch_widths = [2.5e-6, 5e-6, 10e-6, 20e-6, 40e-6];
        Self {
            axes: vec![
                Axis::new("lna.gate_bias", [0.45, 0.50, 0.55]),
                Axis::new("lna.width_total", lna_widths),
                Axis::new("mixer.switch_width", switch_widths),
            ],
            fixed: DesignPoint::default(),
            objectives: vec![Objective::minimize("total_power"), Objective::minimize("sensitivity")],
        }
    }
}

impl SweepSpec {
    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn validate(&self, limit: usize) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::domain("axes", "sweep needs at least one axis"));
        }
        for a in &self.axes {
            if !AXIS_PATHS.contains(&a.path.as_str()) {
                return Err(Error::UnknownKey(a.path.clone()));
            }
            if a.values.is_empty() {
                return Err(Error::domain("axes", format!("axis {} has no values", a.path)));
            }
        }
        let count = self.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
        match count {
            Some(c) if c <= limit => Ok(()),
            Some(c) => Err(Error::GridTooLarge { count: c, limit }),
            None => Err(Error::GridTooLarge { count: usize::MAX, limit }),
        }
    }

    /// Axis values of grid point `index`; the last axis varies fastest.
    pub fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            let n = axis.values.len();
            *slot = axis.values[index % n];
            index /= n;
        }
        out
    }

    pub fn point(&self, coords: &[f64]) -> Result<DesignPoint> {
        let mut p = self.fixed;
        for (axis, &v) in self.axes.iter().zip(coords) {
            apply_axis(&mut p, &axis.path, v)?;
        }
        Ok(p)
    }
}

pub fn apply_axis(p: &mut DesignPoint, path: &str, v: f64) -> Result<()> {
    match path {
        "lna.width_p" => p.lna.width_p = v,
        "lna.width_n" => p.lna.width_n = v,
        "lna.width_total" => p.lna = p.lna.with_total_width(v),
        "lna.gate_bias" => p.lna.gate_bias = v,
        "lna.supply" => p.lna.supply = v,
        "lna.zin_target" => p.lna.zin_target = Some(v),
        // zero selects the off-state feedback transistor
        "lna.feedback" => {
            p.lna.feedback = if v == 0.0 { Feedback::OffTransistor } else { Feedback::Resistor(v) }
        }
        "lna.load_cap" => p.lna.load_cap = v,
        "mixer.n_paths" => {
            if !(v >= 1.0 && v.fract() == 0.0) {
                return Err(Error::domain("mixer.n_paths", format!("must be a positive integer, got {v}")));
            }
            p.mixer.n_paths = v as usize
        }
        "mixer.duty" => p.mixer.duty = v,
        "mixer.switch_width" => p.mixer.switch_width = v,
        "mixer.baseband_cap" => p.mixer.baseband_cap = v,
        "mixer.lo_freq" => p.mixer.lo_freq = v,
        "mixer.supply" => p.mixer.supply = v,
        "matching.rm" => p.matching.rm = v,
        "matching.lm" => p.matching.lm = v,
        "matching.cm" => p.matching.cm = v,
        "link.distance" => p.link.distance = v,
        "link.ber_target" => p.link.ber_target = v,
        "data_rate" => p.data_rate = v,
        other => return Err(Error::UnknownKey(other.to_string())),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coordinates: Vec<f64>,
    pub point: DesignPoint,
    pub metrics: Result<DesignMetrics>,
}

/// Evaluate the full grid in deterministic order; failures stay in place.
pub fn sweep(spec: &SweepSpec, settings: &ExplorerSettings) -> Result<Vec<SweepRow>> {
    spec.validate(settings.max_grid)?;
    (0..spec.grid_size())
        .into_par_iter()
        .map(|i| {
            let coordinates = spec.coordinates(i);
            let point = spec.point(&coordinates)?;
            let metrics = evaluate_design(&point, settings);
            Ok(SweepRow { coordinates, point, metrics })
        })
        .collect()
}

/// Indices of the non-dominated points, stably ordered by the first objective.
pub fn pareto_front(points: &[DesignMetrics], objectives: &[Objective]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::domain("points", "need at least one point"));
    }
    if objectives.is_empty() {
        return Err(Error::domain("objectives", "need at least one objective"));
    }
    let costs: Vec<Vec<f64>> = points
        .iter()
        .map(|m| objectives.iter().map(|o| o.cost(m)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let dominates = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y);
    let mut front: Vec<usize> = (0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| j != i && dominates(&costs[j], &costs[i])))
        .collect();
    front.sort_by(|&a, &b| costs[a][0].partial_cmp(&costs[b][0]).unwrap_or(Ordering::Equal));
    Ok(front)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devicemodels::{lna_operating_point, size_for_zin, Calibration, LnaDesign, LnaMode};
    use proptest::prelude::*;

    fn m(power: f64, sens: f64) -> DesignMetrics {
        DesignMetrics { total_power: power, sensitivity: sens, ..Default::default() }
    }

    fn objectives() -> Vec<Objective> {
        vec![Objective::minimize("total_power"), Objective::minimize("sensitivity")]
    }

    #[test]
    fn pareto_examples() {
        assert_eq!(pareto_front(&[m(1.0, 1.0)], &objectives()).unwrap(), vec![0]);
        let pts = [m(1e-6, -60.0), m(2e-6, -90.0), m(3e-6, -80.0)];
        assert_eq!(pareto_front(&pts, &objectives()).unwrap(), vec![0, 1]);
        let dup = [m(2e-6, -90.0), m(1e-6, -60.0), m(2e-6, -90.0)];
        assert_eq!(pareto_front(&dup, &objectives()).unwrap(), vec![1, 0, 2]);
        assert!(matches!(
            pareto_front(&pts, &[Objective::minimize("nonsense")]),
            Err(Error::UnknownKey(_))
        ));
    }

    fn brute_force(pts: &[DesignMetrics]) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..pts.len() {
            let mut dominated = false;
            for j in 0..pts.len() {
                let (a, b) = (&pts[j], &pts[i]);
                let le = a.total_power <= b.total_power && a.sensitivity <= b.sensitivity;
                let lt = a.total_power < b.total_power || a.sensitivity < b.sensitivity;
                if le && lt {
                    dominated = true;
                }
            }
            if !dominated {
                out.push(i);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn pareto_matches_brute_force(raw in prop::collection::vec((0u8..20, 0u8..20), 1..40)) {
            let pts: Vec<DesignMetrics> = raw.iter().map(|&(p, s)| m(p as f64, s as f64)).collect();
            let mut got = pareto_front(&pts, &objectives()).unwrap();
            got.sort();
            prop_assert_eq!(got, brute_force(&pts));
        }
    }

    #[test]
    fn grid_order_and_limits() {
        let spec = SweepSpec::default();
        assert_eq!(spec.grid_size(), 165);
        let v = |a: usize, i: usize| spec.axes[a].values[i];
        assert_eq!(spec.coordinates(0), vec![v(0, 0), v(1, 0), v(2, 0)]);
        assert_eq!(spec.coordinates(1), vec![v(0, 0), v(1, 0), v(2, 1)]);
        assert_eq!(spec.coordinates(5), vec![v(0, 0), v(1, 1), v(2, 0)]);
        assert_eq!(spec.coordinates(164), vec![v(0, 2), v(1, 10), v(2, 4)]);
        let settings = ExplorerSettings { max_grid: 100, ..Default::default() };
        assert!(matches!(sweep(&spec, &settings), Err(Error::GridTooLarge { count: 165, limit: 100 })));
        let empty = SweepSpec { axes: vec![], ..Default::default() };
        assert!(sweep(&empty, &ExplorerSettings::default()).is_err());
        let bad = SweepSpec { axes: vec![Axis::new("lna.colour", [1.0])], ..Default::default() };
        assert!(matches!(sweep(&bad, &ExplorerSettings::default()), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn failures_recorded_inline() {
        let s = ExplorerSettings::default();
        let rows = sweep(&SweepSpec::default(), &s).unwrap();
        assert_eq!(rows.len(), 165);
        // 2.5 um switches exceed the matched source resistance
        assert!(rows[0].metrics.is_err());
        assert!(rows[2].metrics.is_ok());
        let again = sweep(&SweepSpec::default(), &s).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn sensitivity_worsens_with_bandwidth() {
        let spec = SweepSpec {
            axes: vec![Axis::new("data_rate", [1e5, 3e5, 1e6, 3e6, 1e7])],
            ..Default::default()
        };
        let rows = sweep(&spec, &ExplorerSettings::default()).unwrap();
        let sens: Vec<f64> = rows.iter().map(|r| r.metrics.as_ref().unwrap().sensitivity).collect();
        assert!(sens.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fig3_power_ordering() {
        let cal = Calibration::default();
        let template = LnaDesign { mode: LnaMode::Rf, load_cap: 200e-15, ..Default::default() };
        for bias in cal.transistor.biases() {
            let powers: Vec<f64> = [50.0, 100.0, 200.0, 500.0, 1000.0]
                .iter()
                .map(|&z| lna_operating_point(&size_for_zin(z, bias, &template, &cal).unwrap(), &cal).unwrap().power)
                .collect();
            assert!(powers.windows(2).all(|w| w[1] < w[0]));
        }
    }
}
