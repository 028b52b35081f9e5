//! Passive N-path mixer: switch resistance, noise figure, divider and LO-drive power.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Calibration;
use crate::error::{ensure_positive, Error, Result};
use crate::units::db_from_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DividerArch {
    FlipFlop,
    Circular,
}

impl DividerArch {
    pub fn as_str(self) -> &'static str {
        match self {
            DividerArch::FlipFlop => "flip-flop",
            DividerArch::Circular => "circular",
        }
    }
}

impl std::str::FromStr for DividerArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip-flop" | "flipflop" => Ok(DividerArch::FlipFlop),
            "circular" => Ok(DividerArch::Circular),
            other => Err(Error::domain("divider", format!("unknown architecture {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixerDesign {
    pub n_paths: usize,
    pub duty: f64,
    /// m
    pub switch_width: f64,
    /// On-resistance times width, ohm*m.
    pub rsw_unit: f64,
    /// ohm
    pub source_impedance: f64,
    /// Per-path baseband capacitor, F.
    pub baseband_cap: f64,
    /// Hz
    pub lo_freq: f64,
    pub divider_arch: DividerArch,
    /// V
    pub supply: f64,
}

impl Default for MixerDesign {
    fn default() -> Self {
        Self {
            n_paths: 2,
            duty: 0.25,
            switch_width: 10e-6,
            rsw_unit: 100e-6,
            source_impedance: 50.0,
            baseband_cap: 20e-12,
            lo_freq: 403.5e6,
            divider_arch: DividerArch::Circular,
            supply: 1.0,
        }
    }
}

impl MixerDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::domain("mixer.n_paths", "must be at least 1"));
        }
        if !(self.duty > 0.0 && self.duty.is_finite()) || self.duty * self.n_paths as f64 > 1.0 + 1e-12 {
            return Err(Error::domain(
                "mixer.duty",
                format!("{} with {} paths would overlap", self.duty, self.n_paths),
            ));
        }
        ensure_positive("mixer.switch_width", self.switch_width)?;
        ensure_non_negative("mixer.rsw_unit", self.rsw_unit)?;
        ensure_positive("mixer.source_impedance", self.source_impedance)?;
        ensure_positive("mixer.baseband_cap", self.baseband_cap)?;
        ensure_positive("mixer.lo_freq", self.lo_freq)?;
        ensure_positive("mixer.supply", self.supply)
    }

    pub fn switch_resistance(&self) -> Result<f64> {
        switch_resistance(self.switch_width, self.rsw_unit)
    }

    /// Baseband corner frequency: the average charging conductance is D/(Rs + Rsw).
    pub fn corner_freq(&self) -> Result<f64> {
        let r = self.source_impedance + self.switch_resistance()?;
        Ok(self.duty / (2.0 * PI * r * self.baseband_cap))
    }
}

fn ensure_non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be non-negative, got {v}")))
    }
}

/// Rsw = rsw_unit / W; a zero unit resistance models an ideal switch.
pub fn switch_resistance(width: f64, rsw_unit: f64) -> Result<f64> {
    ensure_positive("switch_width", width)?;
    ensure_non_negative("rsw_unit", rsw_unit)?;
    Ok(rsw_unit / width)
}

/// NF of the ideal 4-phase passive mixer with switch resistance `rsw` driven
/// from `rs`: (pi^2/4) (1 + r)/(1 - r), r = rsw/rs. Returned in dB.
pub fn mixer_noise_figure(rsw: f64, rs: f64) -> Result<f64> {
    ensure_positive("rs", rs)?;
    if !(rsw >= 0.0 && rsw < rs) {
        return Err(Error::domain("rsw", format!("must satisfy 0 <= rsw < rs, got {rsw} vs {rs}")));
    }
    let r = rsw / rs;
    Ok(db_from_ratio(PI * PI / 4.0 * (1.0 + r) / (1.0 - r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DividerModel {
    pub arch: DividerArch,
    /// F
    pub effective_switched_cap: f64,
    /// V
    pub supply: f64,
    pub activity_factor: f64,
}

/// Per-architecture switched capacitance and activity factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DividerCalibration {
    /// F
    pub flip_flop_cap: f64,
    /// F
    pub circular_cap: f64,
    pub activity_factor: f64,
}

impl Default for DividerCalibration {
    fn default() -> Self {
        Self { flip_flop_cap: 120e-15, circular_cap: 40e-15, activity_factor: 1.0 }
    }
}

impl DividerCalibration {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("divider.flip_flop_cap", self.flip_flop_cap)?;
        ensure_positive("divider.circular_cap", self.circular_cap)?;
        ensure_positive("divider.activity_factor", self.activity_factor)?;
        if self.circular_cap >= self.flip_flop_cap {
            return Err(Error::domain(
                "divider.circular_cap",
                "must be below the flip-flop divider capacitance",
            ));
        }
        Ok(())
    }

    pub fn model(&self, arch: DividerArch, supply: f64) -> DividerModel {
        let effective_switched_cap = match arch {
            DividerArch::FlipFlop => self.flip_flop_cap,
            DividerArch::Circular => self.circular_cap,
        };
        DividerModel { arch, effective_switched_cap, supply, activity_factor: self.activity_factor }
    }
}

/// P = alpha C V^2 f.
pub fn divider_power(model: &DividerModel, freq: f64) -> Result<f64> {
    ensure_positive("divider.effective_switched_cap", model.effective_switched_cap)?;
    ensure_positive("divider.supply", model.supply)?;
    ensure_positive("divider.activity_factor", model.activity_factor)?;
    if !(freq >= 0.0 && freq.is_finite()) {
        return Err(Error::domain("freq", format!("must be non-negative, got {freq}")));
    }
    Ok(model.activity_factor * model.effective_switched_cap * model.supply * model.supply * freq)
}

/// Switch gate capacitance summed over all paths, F.
pub fn switch_gate_cap(mixer: &MixerDesign, cal: &Calibration) -> f64 {
    mixer.n_paths as f64 * cal.switch_gate_cap_per_width * mixer.switch_width
}

/// Divider/NLO plus switch-gate (and optional test-load) CV^2f power at `freq`.
pub fn mixer_drive_power(mixer: &MixerDesign, cal: &Calibration, freq: f64) -> Result<f64> {
    mixer.validate()?;
    let div = cal.divider.model(mixer.divider_arch, mixer.supply);
    let load = if cal.include_test_load { cal.test_load_cap } else { 0.0 };
    let c = div.effective_switched_cap + switch_gate_cap(mixer, cal) + load;
    divider_power(&DividerModel { effective_switched_cap: c, ..div }, freq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nf_examples() {
        assert!((mixer_noise_figure(0.0, 50.0).unwrap() - 3.92239754).abs() < 1e-6);
        assert!((mixer_noise_figure(5.0, 50.0).unwrap() - 4.79389930).abs() < 1e-6);
        assert!((mixer_noise_figure(10.0, 500.0).unwrap() - 4.09613850).abs() < 1e-6);
        assert!(mixer_noise_figure(50.0, 50.0).is_err());
        assert!(mixer_noise_figure(-1.0, 50.0).is_err());
    }

    #[test]
    fn nf_monotone_in_ratio() {
        let mut last = f64::MIN;
        for i in 0..99 {
            let nf = mixer_noise_figure(i as f64 * 0.5, 50.0).unwrap();
            assert!(nf > last);
            last = nf;
        }
    }

    #[test]
    fn switch_resistance_scales_inversely() {
        assert!((switch_resistance(10e-6, 100e-6).unwrap() - 10.0).abs() < 1e-12);
        let a = switch_resistance(5e-6, 100e-6).unwrap();
        let b = switch_resistance(10e-6, 100e-6).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(switch_resistance(0.0, 1.0).is_err());
    }

    #[test]
    fn divider_power_examples() {
        let m = DividerModel {
            arch: DividerArch::FlipFlop,
            effective_switched_cap: 5e-12,
            supply: 1.0,
            activity_factor: 1.0,
        };
        assert!((divider_power(&m, 400e6).unwrap() - 2e-3).abs() < 1e-15);
        let half = divider_power(&m, 200e6).unwrap();
        assert!((half - 1e-3).abs() < 1e-15);
        let v2 = divider_power(&DividerModel { supply: 2.0, ..m }, 400e6).unwrap();
        assert!((v2 - 8e-3).abs() < 1e-15);
        let a = divider_power(&DividerModel { activity_factor: 0.5, ..m }, 400e6).unwrap();
        assert!((a - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn circular_beats_flip_flop() {
        let cal = Calibration::default();
        let ff = divider_power(&cal.divider.model(DividerArch::FlipFlop, 1.0), 403.5e6).unwrap();
        let circ = divider_power(&cal.divider.model(DividerArch::Circular, 1.0), 403.5e6).unwrap();
        assert!(circ < ff);
        let bad = DividerCalibration { circular_cap: 200e-15, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn drive_power_includes_divider_and_switches() {
        let cal = Calibration::default();
        let mixer = MixerDesign::default();
        let total = mixer_drive_power(&mixer, &cal, mixer.lo_freq).unwrap();
        let div = divider_power(&cal.divider.model(mixer.divider_arch, 1.0), mixer.lo_freq).unwrap();
        assert!(total > div);
        let wider = MixerDesign { switch_width: 2.0 * mixer.switch_width, ..mixer };
        assert!(mixer_drive_power(&wider, &cal, mixer.lo_freq).unwrap() > total);
        let loaded = Calibration { include_test_load: true, ..cal.clone() };
        let with_load = mixer_drive_power(&mixer, &loaded, mixer.lo_freq).unwrap();
        assert!((with_load - total - loaded.test_load_cap * mixer.lo_freq).abs() < 1e-12);
    }

    #[test]
    fn overlapping_phases_rejected() {
        let m = MixerDesign { n_paths: 4, duty: 0.3, ..Default::default() };
        assert!(m.validate().is_err());
        assert!(MixerDesign::default().validate().is_ok());
    }
}
