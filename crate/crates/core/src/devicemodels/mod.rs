//! Closed-form device models for the LNA, passive mixer, LO divider,
//! matching network and noise cascade.

pub mod cascade;
pub mod lna;
pub mod matching;
pub mod mixer;

pub use cascade::{cascade_nf, Stage};
pub use lna::{
    lna_input_impedance, lna_input_impedance_k, lna_operating_point, size_for_zin,
    solve_feedback_resistor, BiasEntry, Feedback, LnaDesign, LnaMode, LnaReport, TransistorModel,
};
pub use matching::{matching_transform, MatchingNetwork};
pub use mixer::{
    divider_power, mixer_drive_power, mixer_noise_figure, switch_gate_cap, switch_resistance,
    DividerArch, DividerCalibration, DividerModel, MixerDesign,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Technology and trend-model constants. Every report echoes the values in use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibration {
    pub transistor: TransistorModel,
    /// Effective channel-noise factor.
    pub gamma_eff: f64,
    /// Equivalent resistance of the off-state feedback transistor, ohm.
    pub off_feedback_resistance: f64,
    /// Output parasitic capacitance per unit total device width, F/m.
    pub drain_cap_per_width: f64,
    /// Fraction of Zin (1 + k) taken by k/gm when sizing for a match.
    pub kgm_fraction: f64,
    /// Mixer switch on-resistance times width, ohm*m.
    pub rsw_unit: f64,
    /// Mixer switch gate capacitance per unit width, F/m.
    pub switch_gate_cap_per_width: f64,
    pub divider: DividerCalibration,
    /// Measurement test load on the LO path, F.
    pub test_load_cap: f64,
    pub include_test_load: bool,
    /// Available conversion gain of the mixer in the cascade, dB.
    pub mixer_conversion_gain: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            transistor: TransistorModel::default(),
            gamma_eff: 1.0,
            off_feedback_resistance: 10e6,
            drain_cap_per_width: 1e-9,
            kgm_fraction: 300.0 / 550.0,
            rsw_unit: 100e-6,
            switch_gate_cap_per_width: 0.5e-9,
            divider: DividerCalibration::default(),
            test_load_cap: 5e-12,
            include_test_load: false,
            mixer_conversion_gain: -3.92,
        }
    }
}

impl Calibration {
    pub fn validate(&self) -> Result<()> {
        self.transistor.validate()?;
        self.divider.validate()?;
        ensure_positive("calibration.gamma_eff", self.gamma_eff)?;
        ensure_positive("calibration.off_feedback_resistance", self.off_feedback_resistance)?;
        ensure_positive("calibration.rsw_unit", self.rsw_unit)?;
        ensure_positive("calibration.switch_gate_cap_per_width", self.switch_gate_cap_per_width)?;
        ensure_positive("calibration.test_load_cap", self.test_load_cap)?;
        if !(self.drain_cap_per_width >= 0.0 && self.drain_cap_per_width.is_finite()) {
            return Err(Error::domain("calibration.drain_cap_per_width", "must be non-negative"));
        }
        if !(self.kgm_fraction > 0.0 && self.kgm_fraction < 1.0) {
            return Err(Error::domain("calibration.kgm_fraction", "must lie in (0, 1)"));
        }
        if !self.mixer_conversion_gain.is_finite() {
            return Err(Error::domain("calibration.mixer_conversion_gain", "must be finite"));
        }
        Ok(())
    }
}
