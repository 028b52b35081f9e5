//! Link-budget arithmetic: free-space path loss, receiver sensitivity and
//! SNR bookkeeping for the OOK link.
//!
//! All quantities are in dB/dBm unless a name says otherwise. The thermal
//! floor is fixed at -174 dBm/Hz (290 K).

use serde::{Deserialize, Serialize};

use crate::berlab::envelope;
use crate::error::{ensure_positive, Error, Result};
use crate::special::{bisect_decreasing, q_inverse};
use crate::units::{db_from_ratio, SPEED_OF_LIGHT, THERMAL_FLOOR_DBM_HZ};

/// OOK detector used both for the required-SNR lookup and in the BER lab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    /// Phase-aligned real demodulation followed by a slicer.
    CoherentThreshold,
    /// Magnitude of the complex envelope followed by a slicer.
    Envelope,
}

impl Detector {
    pub fn as_str(self) -> &'static str {
        match self {
            Detector::CoherentThreshold => "coherent-threshold",
            Detector::Envelope => "envelope",
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent-threshold" | "coherent" => Ok(Detector::CoherentThreshold),
            "envelope" => Ok(Detector::Envelope),
            other => Err(Error::domain("detector", format!("unknown detector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkParams {
    /// Hz
    pub carrier_freq: f64,
    /// m
    pub distance: f64,
    /// dBm
    pub eirp: f64,
    /// Occupied channel bandwidth, Hz.
    pub channel_bw: f64,
    /// bit/s
    pub data_rate: f64,
    pub ber_target: f64,
    pub detector: Detector,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            carrier_freq: 403.5e6,
            distance: 3.0,
            eirp: -16.0,
            channel_bw: 300e3,
            data_rate: 300e3,
            ber_target: 1e-3,
            detector: Detector::CoherentThreshold,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("carrier_freq", self.carrier_freq)?;
        ensure_positive("distance", self.distance)?;
        ensure_positive("channel_bw", self.channel_bw)?;
        ensure_positive("data_rate", self.data_rate)?;
        validate_ber_target(self.ber_target)?;
        if !self.eirp.is_finite() {
            return Err(Error::domain("eirp", "must be finite"));
        }
        Ok(())
    }
}

fn validate_ber_target(ber: f64) -> Result<()> {
    if ber > 0.0 && ber < 0.5 {
        Ok(())
    } else {
        Err(Error::domain("ber_target", format!("must lie in (0, 0.5), got {ber}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// dBm
    pub sensitivity: f64,
    /// 10 log10(BW), dB
    pub noise_floor_term: f64,
    pub snr_out: f64,
    pub nf: f64,
    /// Received power minus sensitivity, when a link was supplied.
    pub margin_vs_link: Option<f64>,
}

impl SensitivityReport {
    /// Fill in the margin against the power a link delivers to the receiver.
    pub fn with_link(mut self, link: &LinkParams, extra_loss: f64) -> Result<Self> {
        let received = required_sensitivity(link, extra_loss)?;
        self.margin_vs_link = Some(received - self.sensitivity);
        Ok(self)
    }
}

/// Free-space path loss 20 log10(4 pi d f / c), dB.
pub fn fspl(carrier_freq: f64, distance: f64) -> Result<f64> {
    ensure_positive("carrier_freq", carrier_freq)?;
    ensure_positive("distance", distance)?;
    Ok(20.0 * (4.0 * std::f64::consts::PI * distance * carrier_freq / SPEED_OF_LIGHT).log10())
}

/// Power arriving at the receiver: EIRP minus the free-space loss and a
/// user-allocated margin (body loss, fading). This is the sensitivity the
/// receiver must reach for the link to close.
pub fn required_sensitivity(link: &LinkParams, extra_loss: f64) -> Result<f64> {
    link.validate()?;
    if !extra_loss.is_finite() {
        return Err(Error::domain("extra_loss", "must be finite"));
    }
    Ok(link.eirp - fspl(link.carrier_freq, link.distance)? - extra_loss)
}

/// Receiver sensitivity -174 + 10 log10(BW) + SNR_o + NF.
pub fn sensitivity(channel_bw: f64, snr_out: f64, nf: f64) -> Result<SensitivityReport> {
    ensure_positive("channel_bw", channel_bw)?;
    let noise_floor_term = db_from_ratio(channel_bw);
    Ok(SensitivityReport {
        sensitivity: THERMAL_FLOOR_DBM_HZ + noise_floor_term + snr_out + nf,
        noise_floor_term,
        snr_out,
        nf,
        margin_vs_link: None,
    })
}

/// SNR in the data bandwidth from Eb/N0: SNR = Eb/N0 + 10 log10(R / BW).
pub fn snr_from_ebn0(ebn0: f64, data_rate: f64, data_bw: f64) -> Result<f64> {
    ensure_positive("data_rate", data_rate)?;
    ensure_positive("data_bw", data_bw)?;
    Ok(ebn0 + db_from_ratio(data_rate / data_bw))
}

/// Inverse of [`snr_from_ebn0`].
pub fn ebn0_from_snr(snr: f64, data_rate: f64, data_bw: f64) -> Result<f64> {
    ensure_positive("data_rate", data_rate)?;
    ensure_positive("data_bw", data_bw)?;
    Ok(snr - db_from_ratio(data_rate / data_bw))
}

/// SNR (average signal power over noise power in the data bandwidth) needed
/// to reach `ber_target` with the given detector.
pub fn required_snr_ook(ber_target: f64, detector: Detector) -> Result<f64> {
    validate_ber_target(ber_target)?;
    match detector {
        Detector::CoherentThreshold => {
            // BER = Q(sqrt(SNR/2))  =>  SNR = 2 Qinv(BER)^2
            let x = q_inverse(ber_target);
            Ok(db_from_ratio(2.0 * x * x))
        }
        Detector::Envelope => Ok(bisect_decreasing(-40.0, 60.0, 1e-9, ber_target, |snr| {
            envelope::optimal_ber(snr)
        })),
    }
}
