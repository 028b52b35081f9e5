//! Monte Carlo noise figure and empirical corner location.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::spectrum::{AmplitudeSpectrum, Welch};
use super::{settle_samples, Engine, OVERSAMPLE_FLOOR};
use crate::devicemodels::MixerDesign;
use crate::error::{ensure_positive, Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::special::bisect_decreasing;
use crate::units::{db_from_amplitude, db_from_ratio, BOLTZMANN, T0_KELVIN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NfSettings {
    /// Sample rate in multiples of the LO frequency.
    pub samples_per_lo: f64,
    /// Approximate number of noise samples to average.
    pub budget_samples: usize,
    /// K
    pub temperature: f64,
}

impl Default for NfSettings {
    fn default() -> Self {
        Self { samples_per_lo: OVERSAMPLE_FLOOR, budget_samples: 1 << 25, temperature: T0_KELVIN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfReport {
    /// dB
    pub nf: f64,
    /// Output PSD in the measurement band, V^2/Hz.
    pub output_psd: f64,
    /// Signal voltage gain at the measurement offset, dB.
    pub gain: f64,
    /// Hz
    pub corner_estimate: f64,
    pub segments: usize,
}

/// Steady-state voltage gain (linear) for a unit tone at f_LO + df.
fn tone_gain(mixer: &MixerDesign, df: f64, sample_rate: f64) -> Result<f64> {
    let mut engine = Engine::new(mixer, sample_rate)?;
    let settle = settle_samples(mixer, sample_rate)?;
    let cycles = (16.0 / df).max(64.0 / mixer.lo_freq);
    let n = settle + (cycles * sample_rate).ceil() as usize;
    let f = mixer.lo_freq + df;
    let w = 2.0 * std::f64::consts::PI * f / sample_rate;
    let mut bb = Vec::with_capacity(n - settle);
    for k in 0..n {
        engine.step(k as u64, (w * k as f64).cos());
        if k >= settle {
            bb.push(engine.baseband());
        }
    }
    let spec = AmplitudeSpectrum::of_real(&bb, sample_rate);
    Ok(2.0 * spec.peak_near(df, 4).1)
}

/// Simulated SSB noise figure of `mixer` with default settings.
pub fn simulated_noise_figure(mixer: &MixerDesign, seed: u64) -> Result<f64> {
    simulated_noise_figure_with(mixer, &NfSettings::default(), seed).map(|r| r.nf)
}

/// Inject thermal noise for the source and switch resistances, measure the
/// baseband PSD well inside the corner and refer it to the source noise
/// through the signal gain at the same offset.
pub fn simulated_noise_figure_with(mixer: &MixerDesign, settings: &NfSettings, seed: u64) -> Result<NfReport> {
    ensure_positive("temperature", settings.temperature)?;
    if settings.samples_per_lo < OVERSAMPLE_FLOOR {
        return Err(Error::Undersampled {
            sample_rate: settings.samples_per_lo * mixer.lo_freq,
            required: OVERSAMPLE_FLOOR * mixer.lo_freq,
        });
    }
    let fs = settings.samples_per_lo * mixer.lo_freq;
    let mut engine = Engine::new(mixer, fs)?;
    let fc = mixer.corner_freq()?;
    let rs = mixer.source_impedance;
    let rsw = mixer.switch_resistance()?;
    let kt = BOLTZMANN * settings.temperature;
    let sigma_s = (2.0 * kt * rs * fs).sqrt();
    let sigma_sw = (2.0 * kt * rsw * fs).sqrt();

    let segment = ((200.0 * fs / fc).ceil() as usize).next_power_of_two().clamp(1 << 12, 1 << 20);
    let segments = (settings.budget_samples / segment).max(16);
    let settle = settle_samples(mixer, fs)?;
    let mut welch = Welch::new(segment, fs);
    let mut src = stream_rng(seed, Stream::SourceNoise, 0);
    let mut sw = stream_rng(seed, Stream::SwitchNoise, 0);
    let total = settle + segment * segments;
    for k in 0..total {
        let ns: f64 = src.sample(StandardNormal);
        let nsw: f64 = sw.sample(StandardNormal);
        engine.step(k as u64, sigma_s * ns + sigma_sw * nsw);
        if k >= settle {
            welch.push(engine.baseband());
        }
    }
    let output_psd = welch
        .band_mean(0.02 * fc, 0.1 * fc)
        .ok_or(Error::Resolution { if_freq: 0.02 * fc, resolution: welch.resolution() })?;
    let g = tone_gain(mixer, 0.05 * fc, fs)?;
    let f = output_psd / (g * g * 4.0 * kt * rs);
    Ok(NfReport {
        nf: db_from_ratio(f),
        output_psd,
        gain: db_from_amplitude(g),
        corner_estimate: fc,
        segments: welch.segments(),
    })
}

/// Offset frequency where the conversion gain falls 3 dB below its
/// low-frequency value, found by bisection on simulated gain.
pub fn locate_corner(mixer: &MixerDesign, sample_rate: f64) -> Result<f64> {
    let est = mixer.corner_freq()?;
    let g0 = db_from_amplitude(tone_gain(mixer, est / 50.0, sample_rate)?);
    let mut err = None;
    let x = bisect_decreasing((est / 8.0).ln(), (est * 8.0).ln(), 1e-4, -3.0, |x| {
        match tone_gain(mixer, x.exp(), sample_rate) {
            Ok(g) => db_from_amplitude(g) - g0,
            Err(e) => {
                err = Some(e);
                f64::NAN
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(x.exp()),
    }
}
