//! Whole-receiver composition: matching network, mixer and baseband LNA
//! evaluated into power, noise figure, sensitivity and energy per bit.

pub mod optimize;
pub mod sweep;

pub use optimize::{
    energy_per_bit_curve, optimize_min_power, CurvePoint, Optimum, Preset, Targets,
};
pub use sweep::{pareto_front, sweep, Axis, Direction, Objective, SweepRow, SweepSpec};

use serde::{Deserialize, Serialize};

use crate::devicemodels::{
    cascade_nf, divider_power, lna_operating_point, mixer_drive_power, mixer_noise_figure,
    Calibration, LnaDesign, LnaMode, MatchingNetwork, MixerDesign, Stage,
};
use crate::error::{ensure_positive, Error, Result};
use crate::linkbudget::{required_snr_ook, sensitivity, snr_from_ebn0, LinkParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignPoint {
    pub lna: LnaDesign,
    pub mixer: MixerDesign,
    pub matching: MatchingNetwork,
    pub link: LinkParams,
    /// bit/s; also the data bandwidth.
    pub data_rate: f64,
}

impl Default for DesignPoint {
    fn default() -> Self {
        Self {
            lna: LnaDesign::default(),
            mixer: MixerDesign::default(),
            matching: MatchingNetwork::default(),
            link: LinkParams::default(),
            data_rate: 300e3,
        }
    }
}

/// Settings shared by every evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorerSettings {
    pub calibration: Calibration,
    /// Added to every sensitivity, dB.
    pub implementation_loss: f64,
    /// System NF assumed when relaxing the sensitivity target with rate, dB.
    pub nf_budget: f64,
    pub max_grid: usize,
}

impl Default for ExplorerSettings {
    fn default() -> Self {
        Self {
            calibration: Calibration::default(),
            implementation_loss: 0.0,
            nf_budget: 23.2,
            max_grid: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Breakdown {
    /// Baseband LNA, W.
    pub lna: f64,
    /// Divider and non-overlap generator, W.
    pub divider_nlo: f64,
    /// Switch gate drive on top of the divider, W.
    pub mixer_drive: f64,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.lna + self.divider_nlo + self.mixer_drive
    }

    pub fn entries(&self) -> [(&'static str, f64); 3] {
        [("lna", self.lna), ("divider_nlo", self.divider_nlo), ("mixer_drive", self.mixer_drive)]
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DesignMetrics {
    /// W
    pub total_power: f64,
    pub breakdown: Breakdown,
    /// dB
    pub system_nf: f64,
    /// dBm
    pub sensitivity: f64,
    /// J/bit
    pub energy_per_bit: f64,
    pub feasible: bool,
    pub reason: Option<String>,
    /// Hz
    pub lna_bandwidth: f64,
    pub lna_nf: f64,
    pub mixer_nf: f64,
    /// Real part of the matched source seen by the mixer, ohm.
    pub source_resistance: f64,
}

/// Metric names usable as sweep objectives.
pub const METRIC_KEYS: [&str; 8] = [
    "total_power",
    "sensitivity",
    "energy_per_bit",
    "system_nf",
    "lna_bandwidth",
    "lna_power",
    "divider_power",
    "mixer_drive_power",
];

impl DesignMetrics {
    pub fn metric(&self, key: &str) -> Result<f64> {
        Ok(match key {
            "total_power" => self.total_power,
            "sensitivity" => self.sensitivity,
            "energy_per_bit" => self.energy_per_bit,
            "system_nf" => self.system_nf,
            "lna_bandwidth" => self.lna_bandwidth,
            "lna_power" => self.breakdown.lna,
            "divider_power" => self.breakdown.divider_nlo,
            "mixer_drive_power" => self.breakdown.mixer_drive,
            other => return Err(Error::UnknownKey(other.to_string())),
        })
    }
}

/// SNR needed in the data bandwidth, with BW equal to the data rate.
pub fn required_output_snr(link: &LinkParams, data_rate: f64) -> Result<f64> {
    let ebn0 = required_snr_ook(link.ber_target, link.detector)?;
    snr_from_ebn0(ebn0, data_rate, data_rate)
}

/// Differential source resistance a baseband LNA sees behind the mixer.
pub fn baseband_source_resistance(rs: f64, rsw: f64, duty: f64) -> f64 {
    2.0 * (rs + rsw) / duty
}

pub fn evaluate_design(point: &DesignPoint, settings: &ExplorerSettings) -> Result<DesignMetrics> {
    let cal = &settings.calibration;
    ensure_positive("data_rate", point.data_rate)?;
    point.link.validate().map_err(|e| e.in_block("link"))?;

    let z = point
        .matching
        .impedance(point.link.carrier_freq)
        .map_err(|e| e.in_block("matching"))?;
    let rs = z.re;
    let mixer = MixerDesign { source_impedance: rs, ..point.mixer };
    mixer.validate().map_err(|e| e.in_block("mixer"))?;
    let rsw = mixer.switch_resistance().map_err(|e| e.in_block("mixer"))?;
    let mixer_nf = mixer_noise_figure(rsw, rs).map_err(|e| e.in_block("mixer"))?;

    let zs = match point.lna.mode {
        LnaMode::BasebandDifferential => baseband_source_resistance(rs, rsw, mixer.duty),
        LnaMode::Rf => rs,
    };
    let lna = LnaDesign {
        source_resistance: point.lna.source_resistance.or(Some(zs)),
        ..point.lna
    };
    let lna_report = lna_operating_point(&lna, cal).map_err(|e| e.in_block("lna"))?;

    let system_nf = cascade_nf(&[
        Stage::new(mixer_nf, cal.mixer_conversion_gain),
        Stage::new(lna_report.nf, lna_report.flat_band_gain),
    ])?;
    let snr_o = required_output_snr(&point.link, point.data_rate)?;
    let sens = sensitivity(point.data_rate, snr_o, system_nf)?.sensitivity + settings.implementation_loss;

    let div = divider_power(&cal.divider.model(mixer.divider_arch, mixer.supply), mixer.lo_freq)
        .map_err(|e| e.in_block("divider"))?;
    let drive = mixer_drive_power(&mixer, cal, mixer.lo_freq).map_err(|e| e.in_block("mixer"))?;
    let breakdown = Breakdown { lna: lna_report.power, divider_nlo: div, mixer_drive: drive - div };
    let total_power = breakdown.total();

    let (feasible, reason) = if lna_report.bandwidth >= point.data_rate {
        (true, None)
    } else {
        (
            false,
            Some(format!(
                "LNA bandwidth {:.4e} Hz below data rate {:.4e} bit/s",
                lna_report.bandwidth, point.data_rate
            )),
        )
    };
    Ok(DesignMetrics {
        total_power,
        breakdown,
        system_nf,
        sensitivity: sens,
        energy_per_bit: total_power / point.data_rate,
        feasible,
        reason,
        lna_bandwidth: lna_report.bandwidth,
        lna_nf: lna_report.nf,
        mixer_nf,
        source_resistance: rs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub power: Breakdown,
    pub fractions: Breakdown,
    pub total: f64,
}

pub fn power_breakdown_report(point: &DesignPoint, settings: &ExplorerSettings) -> Result<BreakdownReport> {
    let m = evaluate_design(point, settings)?;
    let b = m.breakdown;
    let t = m.total_power;
    let fractions = Breakdown { lna: b.lna / t, divider_nlo: b.divider_nlo / t, mixer_drive: 0.0 };
    // close the sum from the remainder so the fractions add to one
    let fractions = Breakdown { mixer_drive: 1.0 - fractions.lna - fractions.divider_nlo, ..fractions };
    Ok(BreakdownReport { power: b, fractions, total: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn default_point_is_consistent() {
        let s = ExplorerSettings::default();
        let p = DesignPoint::default();
        let m = evaluate_design(&p, &s).unwrap();
        assert_eq!(m.total_power, m.breakdown.total());
        assert_eq!(m.energy_per_bit * p.data_rate, m.total_power);
        assert!(m.feasible);
        assert_eq!(evaluate_design(&p, &s).unwrap(), m);
    }

    #[test]
    fn energy_per_bit_anchors() {
        let p = 34e-6 / 10e6;
        assert_eq!(p, 3.4e-12);
        assert!((29.2e-6_f64 / 300e3 / 97.3e-12 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_rate_rejected() {
        let p = DesignPoint { data_rate: 0.0, ..Default::default() };
        assert!(evaluate_design(&p, &ExplorerSettings::default()).is_err());
    }

    #[test]
    fn sub_model_errors_name_the_block() {
        let p = DesignPoint { mixer: MixerDesign { switch_width: 1e-6, ..Default::default() }, ..Default::default() };
        match evaluate_design(&p, &ExplorerSettings::default()) {
            Err(Error::Block { block, .. }) => assert_eq!(block, "mixer"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn implementation_loss_shifts_sensitivity() {
        let p = DesignPoint::default();
        let a = evaluate_design(&p, &ExplorerSettings::default()).unwrap();
        let b = evaluate_design(&p, &ExplorerSettings { implementation_loss: 2.5, ..Default::default() }).unwrap();
        assert!((b.sensitivity - a.sensitivity - 2.5).abs() < 1e-12);
    }

    #[test]
    fn breakdown_fractions() {
        let s = ExplorerSettings::default();
        let p = DesignPoint::default();
        let r = power_breakdown_report(&p, &s).unwrap();
        let f = r.fractions;
        assert!((f.lna + f.divider_nlo + f.mixer_drive - 1.0).abs() < 1e-12);
        let wide = DesignPoint { lna: p.lna.with_total_width(10.0 * p.lna.total_width()), ..p };
        let r2 = power_breakdown_report(&wide, &s).unwrap();
        assert!(r2.fractions.lna > f.lna);
    }
}
