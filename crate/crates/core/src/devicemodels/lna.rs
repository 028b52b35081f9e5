//! Inverter-based resistive-feedback LNA: input-impedance algebra and a
//! calibrated power/bandwidth/gain/noise trend model.

use serde::{Deserialize, Serialize};

use super::Calibration;
use crate::error::{ensure_positive, Error, Result};
use crate::units::{db_from_amplitude, db_from_ratio};

/// One calibrated gate-bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasEntry {
    /// V
    pub gate_bias: f64,
    /// 1/V
    pub gm_over_id: f64,
    /// Drain current per unit width, A/m.
    pub current_density: f64,
    /// Intrinsic gain gm*ro.
    pub intrinsic_gain_k: f64,
}

/// Bias-indexed calibration table plus the technology width limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransistorModel {
    pub table: Vec<BiasEntry>,
    /// m
    pub max_width: f64,
}

impl Default for TransistorModel {
    fn default() -> Self {
        // three gate biases at and above 0.45 V; k between 10 and 11
        Self {
            table: vec![
                BiasEntry { gate_bias: 0.45, gm_over_id: 20.0, current_density: 1.0, intrinsic_gain_k: 11.0 },
                BiasEntry { gate_bias: 0.50, gm_over_id: 16.0, current_density: 2.5, intrinsic_gain_k: 10.5 },
                BiasEntry { gate_bias: 0.55, gm_over_id: 12.0, current_density: 5.0, intrinsic_gain_k: 10.0 },
            ],
            max_width: 2e-3,
        }
    }
}

impl TransistorModel {
    pub fn validate(&self) -> Result<()> {
        if self.table.is_empty() {
            return Err(Error::domain("transistor.table", "needs at least one bias entry"));
        }
        for e in &self.table {
            ensure_positive("transistor.table.gate_bias", e.gate_bias)?;
            ensure_positive("transistor.table.gm_over_id", e.gm_over_id)?;
            ensure_positive("transistor.table.current_density", e.current_density)?;
            if !(1.0..=100.0).contains(&e.intrinsic_gain_k) {
                return Err(Error::domain(
                    "transistor.table.intrinsic_gain_k",
                    format!("must lie in [1, 100], got {}", e.intrinsic_gain_k),
                ));
            }
        }
        if self.table.windows(2).any(|w| w[1].gate_bias <= w[0].gate_bias) {
            return Err(Error::domain("transistor.table", "gate biases must be strictly increasing"));
        }
        ensure_positive("transistor.max_width", self.max_width)
    }

    /// Calibration at `bias`, linearly interpolated between table entries.
    pub fn at(&self, bias: f64) -> Result<BiasEntry> {
        let first = self.table.first().ok_or_else(|| Error::domain("transistor.table", "empty"))?;
        let last = self.table.last().unwrap();
        let eps = 1e-12;
        if !(bias >= first.gate_bias - eps && bias <= last.gate_bias + eps) {
            return Err(Error::BiasOutOfRange { bias, min: first.gate_bias, max: last.gate_bias });
        }
        if let Some(e) = self.table.iter().find(|e| (e.gate_bias - bias).abs() <= eps) {
            return Ok(*e);
        }
        let hi = self.table.iter().position(|e| e.gate_bias > bias).unwrap();
        let (a, b) = (self.table[hi - 1], self.table[hi]);
        let t = (bias - a.gate_bias) / (b.gate_bias - a.gate_bias);
        let lerp = |x: f64, y: f64| x + t * (y - x);
        Ok(BiasEntry {
            gate_bias: bias,
            gm_over_id: lerp(a.gm_over_id, b.gm_over_id),
            current_density: lerp(a.current_density, b.current_density),
            intrinsic_gain_k: lerp(a.intrinsic_gain_k, b.intrinsic_gain_k),
        })
    }

    pub fn biases(&self) -> Vec<f64> {
        self.table.iter().map(|e| e.gate_bias).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feedback {
    /// Feedback resistor, ohm.
    Resistor(f64),
    /// Off-state transistor; modeled as the calibrated large equivalent resistance.
    OffTransistor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LnaMode {
    Rf,
    BasebandDifferential,
}

/// LNA sizing and bias. In differential mode the widths describe one half
/// and power counts both halves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LnaDesign {
    pub width_p: f64,
    pub width_n: f64,
    pub gate_bias: f64,
    pub supply: f64,
    pub feedback: Feedback,
    pub load_cap: f64,
    pub mode: LnaMode,
    /// When set, the feedback resistor is solved to present this input impedance.
    #[serde(default)]
    pub zin_target: Option<f64>,
    /// Source resistance for the noise figure; `None` means matched (source = Zin).
    #[serde(default)]
    pub source_resistance: Option<f64>,
}

impl Default for LnaDesign {
    fn default() -> Self {
        Self {
            width_p: 8e-6,
            width_n: 4e-6,
            gate_bias: 0.45,
            supply: 1.0,
            feedback: Feedback::OffTransistor,
            load_cap: 150e-15,
            mode: LnaMode::BasebandDifferential,
            zin_target: None,
            source_resistance: None,
        }
    }
}

impl LnaDesign {
    /// Split a total width 2:1 between PMOS and NMOS.
    pub fn with_total_width(mut self, total: f64) -> Self {
        self.width_p = total * 2.0 / 3.0;
        self.width_n = total / 3.0;
        self
    }

    pub fn total_width(&self) -> f64 {
        self.width_p + self.width_n
    }

    /// Returns warnings for soft rule violations.
    pub fn validate(&self, model: &TransistorModel) -> Result<Vec<String>> {
        for (field, w) in [("lna.width_p", self.width_p), ("lna.width_n", self.width_n)] {
            ensure_positive(field, w)?;
            if w > model.max_width {
                return Err(Error::domain(
                    field,
                    format!("{w} m exceeds the technology maximum {} m", model.max_width),
                ));
            }
        }
        ensure_positive("lna.supply", self.supply)?;
        ensure_positive("lna.load_cap", self.load_cap)?;
        if let Feedback::Resistor(r) = self.feedback {
            ensure_positive("lna.feedback", r)?;
        }
        if let Some(z) = self.zin_target {
            ensure_positive("lna.zin_target", z)?;
        }
        if let Some(r) = self.source_resistance {
            ensure_positive("lna.source_resistance", r)?;
        }
        let mut warnings = Vec::new();
        let ratio = self.width_p / self.width_n;
        if (ratio - 2.0).abs() > 0.2 {
            warnings.push(format!(
                "PMOS:NMOS width ratio {ratio:.2} departs from 2:1; output may not bias near VDD/2"
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LnaReport {
    /// W
    pub power: f64,
    /// Hz
    pub bandwidth: f64,
    /// dB
    pub flat_band_gain: f64,
    /// dB
    pub nf: f64,
    /// ohm
    pub zin: f64,
    /// Feedback resistance actually used, ohm.
    pub rf_used: f64,
    /// Transconductance of one half, S.
    pub gm: f64,
    pub ro: f64,
    pub warnings: Vec<String>,
}

/// Zin = rf/(1 + gm ro) + ro/(1 + gm ro).
pub fn lna_input_impedance(rf: f64, gm: f64, ro: f64) -> Result<f64> {
    ensure_positive("rf", rf)?;
    ensure_positive("gm", gm)?;
    ensure_positive("ro", ro)?;
    let denom = 1.0 + gm * ro;
    Ok(rf / denom + ro / denom)
}

/// Zin = (rf + k/gm)/(1 + k), the same impedance written with k = gm ro.
pub fn lna_input_impedance_k(rf: f64, gm: f64, k: f64) -> f64 {
    (rf + k / gm) / (1.0 + k)
}

/// Feedback resistor that presents `zin_target`: rf = Zin (1 + k) - k/gm.
pub fn solve_feedback_resistor(zin_target: f64, gm: f64, k: f64) -> Result<f64> {
    ensure_positive("zin_target", zin_target)?;
    ensure_positive("gm", gm)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain("k", format!("must be non-negative, got {k}")));
    }
    let rf = zin_target * (1.0 + k) - k / gm;
    if rf > 0.0 {
        Ok(rf)
    } else {
        Err(Error::InfeasibleMatch {
            target: zin_target,
            min_achievable: k / (gm * (1.0 + k)),
        })
    }
}

fn parallel(a: f64, b: f64) -> f64 {
    a * b / (a + b)
}

/// Evaluate the LNA trend model at a design point.
pub fn lna_operating_point(design: &LnaDesign, cal: &Calibration) -> Result<LnaReport> {
    let model = &cal.transistor;
    let warnings = design.validate(model)?;
    let bias = model.at(design.gate_bias)?;
    let current = bias.current_density * design.total_width();
    let halves = match design.mode {
        LnaMode::Rf => 1.0,
        LnaMode::BasebandDifferential => 2.0,
    };
    let power = halves * design.supply * current;
    let gm = bias.gm_over_id * current;
    let k = bias.intrinsic_gain_k;
    let ro = k / gm;
    let rf = match (design.zin_target, design.feedback) {
        (Some(z), _) => solve_feedback_resistor(z, gm, k)?,
        (None, Feedback::Resistor(r)) => r,
        (None, Feedback::OffTransistor) => cal.off_feedback_resistance,
    };
    let zin = lna_input_impedance(rf, gm, ro)?;
    let r_out = parallel(ro, rf);
    let c_out = design.load_cap + cal.drain_cap_per_width * design.total_width();
    let bandwidth = 1.0 / (2.0 * std::f64::consts::PI * r_out * c_out);
    let flat_band_gain = db_from_amplitude(gm * r_out);
    let source = design.source_resistance.unwrap_or(zin);
    // each half of a differential pair sees half the differential source
    let excess = halves * cal.gamma_eff / (gm * source);
    Ok(LnaReport {
        power,
        bandwidth,
        flat_band_gain,
        nf: db_from_ratio(1.0 + excess),
        zin,
        rf_used: rf,
        gm,
        ro,
        warnings,
    })
}

/// Size an LNA for a matched input impedance at `gate_bias`: the intrinsic
/// term k/gm takes the calibrated fraction of Zin (1 + k) and the feedback
/// resistor supplies the rest; widths split 2:1.
pub fn size_for_zin(
    zin: f64,
    gate_bias: f64,
    template: &LnaDesign,
    cal: &Calibration,
) -> Result<LnaDesign> {
    ensure_positive("zin_target", zin)?;
    let bias = cal.transistor.at(gate_bias)?;
    let k = bias.intrinsic_gain_k;
    let gm = k / (cal.kgm_fraction * zin * (1.0 + k));
    let current = gm / bias.gm_over_id;
    let total = current / bias.current_density;
    let design = LnaDesign {
        gate_bias,
        zin_target: Some(zin),
        source_resistance: None,
        ..template.with_total_width(total)
    };
    design.validate(&cal.transistor)?;
    Ok(design)
}
