//! Sample-level simulation of an N-path passive mixer: non-overlapping LO
//! phases, switched RC paths, conversion and noise measurements.

pub mod noise;
pub mod spectrum;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::devicemodels::MixerDesign;
use crate::error::{ensure_positive, Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::units::db_from_amplitude;

pub use noise::{locate_corner, simulated_noise_figure, simulated_noise_figure_with, NfSettings};
use spectrum::AmplitudeSpectrum;

/// Minimum simulation rate in multiples of the highest LO or RF frequency.
pub const OVERSAMPLE_FLOOR: f64 = 32.0;

/// Per-sample phase schedule without storing the waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NloClock {
    pub n_paths: usize,
    pub duty: f64,
    pub lo_freq: f64,
    pub sample_rate: f64,
}

impl NloClock {
    pub fn new(n_paths: usize, duty: f64, lo_freq: f64, sample_rate: f64) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::domain("n_paths", "must be at least 1"));
        }
        ensure_positive("lo_freq", lo_freq)?;
        ensure_positive("duty", duty)?;
        if duty * n_paths as f64 > 1.0 + 1e-12 {
            return Err(Error::domain("duty", format!("{duty} x {n_paths} paths exceeds 1")));
        }
        let required = OVERSAMPLE_FLOOR * lo_freq;
        if !(sample_rate >= required) {
            return Err(Error::Undersampled { sample_rate, required });
        }
        Ok(Self { n_paths, duty, lo_freq, sample_rate })
    }

    /// Index of the path connected at sample `k`, if any.
    pub fn active(&self, k: u64) -> Option<usize> {
        let n = self.n_paths as f64;
        let x = (k as f64 * self.lo_freq / self.sample_rate).fract() * n;
        let idx = x.floor();
        (x - idx < self.duty * n).then(|| (idx as usize).min(self.n_paths - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NloWaveforms {
    pub sample_rate: f64,
    pub duty: f64,
    pub lo_freq: f64,
    pub phases: Vec<Vec<bool>>,
}

/// Non-overlapping LO phases; phase 0 rises at t = 0.
pub fn gen_nlo(
    n_paths: usize,
    duty: f64,
    lo_freq: f64,
    sample_rate: f64,
    n_samples: usize,
) -> Result<NloWaveforms> {
    let clock = NloClock::new(n_paths, duty, lo_freq, sample_rate)?;
    let mut phases = vec![vec![false; n_samples]; n_paths];
    for k in 0..n_samples {
        if let Some(i) = clock.active(k as u64) {
            phases[i][k] = true;
        }
    }
    Ok(NloWaveforms { sample_rate, duty, lo_freq, phases })
}

/// RF input applied behind the source resistance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Input {
    /// amplitude * cos(2 pi freq t + phase)
    Tone { freq: f64, amplitude: f64, #[serde(default)] phase: f64 },
    /// White noise with the given one-sided PSD, V^2/Hz.
    Noise { psd: f64 },
    Sum(Vec<Input>),
}

impl Input {
    pub fn tone(freq: f64, amplitude: f64) -> Self {
        Input::Tone { freq, amplitude, phase: 0.0 }
    }

    fn max_freq(&self) -> f64 {
        match self {
            Input::Tone { freq, .. } => *freq,
            Input::Noise { .. } => 0.0,
            Input::Sum(parts) => parts.iter().map(Input::max_freq).fold(0.0, f64::max),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Input::Tone { freq, amplitude, phase } => {
                if !(*freq >= 0.0 && freq.is_finite() && amplitude.is_finite() && phase.is_finite()) {
                    return Err(Error::domain("input.tone", "frequency, amplitude and phase must be finite"));
                }
                Ok(())
            }
            Input::Noise { psd } => {
                if !(*psd >= 0.0 && psd.is_finite()) {
                    return Err(Error::domain("input.noise.psd", "must be non-negative"));
                }
                Ok(())
            }
            Input::Sum(parts) => parts.iter().try_for_each(Input::validate),
        }
    }

    /// Noise inputs in the order encountered; each gets its own substream.
    fn noise_sigmas(&self, fs: f64, out: &mut Vec<f64>) {
        match self {
            Input::Noise { psd } => out.push((psd * fs / 2.0).sqrt()),
            Input::Sum(parts) => parts.iter().for_each(|p| p.noise_sigmas(fs, out)),
            Input::Tone { .. } => {}
        }
    }

    fn deterministic_at(&self, t: f64) -> f64 {
        match self {
            Input::Tone { freq, amplitude, phase } => amplitude * (2.0 * PI * freq * t + phase).cos(),
            Input::Noise { .. } => 0.0,
            Input::Sum(parts) => parts.iter().map(|p| p.deterministic_at(t)).sum(),
        }
    }
}

/// Switched-RC state shared by the waveform and noise simulations.
pub(crate) struct Engine {
    pub clock: NloClock,
    pub caps: Vec<f64>,
    decay: f64,
}

impl Engine {
    pub fn new(mixer: &MixerDesign, sample_rate: f64) -> Result<Self> {
        mixer.validate()?;
        let clock = NloClock::new(mixer.n_paths, mixer.duty, mixer.lo_freq, sample_rate)?;
        let r = mixer.source_impedance + mixer.switch_resistance()?;
        let decay = (-1.0 / (sample_rate * r * mixer.baseband_cap)).exp();
        Ok(Self { clock, caps: vec![0.0; mixer.n_paths], decay })
    }

    /// Advance one sample with source voltage `e` (already including any
    /// resistor noise). Returns the connected path.
    #[inline]
    pub fn step(&mut self, k: u64, e: f64) -> Option<usize> {
        let active = self.clock.active(k);
        if let Some(i) = active {
            let v = &mut self.caps[i];
            *v = e + (*v - e) * self.decay;
        }
        active
    }

    pub fn baseband(&self) -> f64 {
        let n = self.caps.len();
        if n % 2 == 0 {
            self.caps[0] - self.caps[n / 2]
        } else {
            self.caps[0]
        }
    }

    pub fn quadrature(&self) -> Option<f64> {
        let n = self.caps.len();
        (n % 4 == 0).then(|| self.caps[n / 4] - self.caps[3 * n / 4])
    }
}

/// Samples to discard before steady state: ten baseband time constants.
pub fn settle_samples(mixer: &MixerDesign, sample_rate: f64) -> Result<usize> {
    let r = mixer.source_impedance + mixer.switch_resistance()?;
    let tau = r * mixer.baseband_cap / mixer.duty;
    Ok((10.0 * tau * sample_rate).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NpathRunResult {
    pub sample_rate: f64,
    pub time_axis: Vec<f64>,
    pub phases: Vec<Vec<bool>>,
    pub per_path_cap_voltages: Vec<Vec<f64>>,
    /// Path 0 minus the path 180 degrees away.
    pub combined_baseband: Vec<f64>,
    /// 90 minus 270 degrees, when the path count allows.
    pub quadrature: Option<Vec<f64>>,
    pub input_waveform: Vec<f64>,
    /// Leading samples still inside the start-up transient.
    pub settle_samples: usize,
}

/// Simulate `duration` seconds of the switched-RC network at `sample_rate`.
pub fn simulate_npath(
    mixer: &MixerDesign,
    input: &Input,
    duration: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<NpathRunResult> {
    input.validate()?;
    ensure_positive("duration", duration)?;
    ensure_positive("sample_rate", sample_rate)?;
    let required = OVERSAMPLE_FLOOR * mixer.lo_freq.max(input.max_freq());
    if sample_rate < required {
        return Err(Error::Undersampled { sample_rate, required });
    }
    if duration * mixer.lo_freq < 64.0 {
        return Err(Error::domain("duration", "must cover at least 64 LO cycles"));
    }
    let mut engine = Engine::new(mixer, sample_rate)?;
    let n = (duration * sample_rate).round() as usize;
    let n_paths = mixer.n_paths;

    let mut sigmas = Vec::new();
    input.noise_sigmas(sample_rate, &mut sigmas);
    let mut rngs: Vec<_> = (0..sigmas.len()).map(|i| stream_rng(seed, Stream::InputNoise, i as u64)).collect();

    let mut out = NpathRunResult {
        sample_rate,
        time_axis: Vec::with_capacity(n),
        phases: vec![Vec::with_capacity(n); n_paths],
        per_path_cap_voltages: vec![Vec::with_capacity(n); n_paths],
        combined_baseband: Vec::with_capacity(n),
        quadrature: engine.quadrature().map(|_| Vec::with_capacity(n)),
        input_waveform: Vec::with_capacity(n),
        settle_samples: settle_samples(mixer, sample_rate)?.min(n / 2),
    };
    for k in 0..n {
        let t = k as f64 / sample_rate;
        let mut e = input.deterministic_at(t);
        for (s, rng) in sigmas.iter().zip(rngs.iter_mut()) {
            let z: f64 = rng.sample(StandardNormal);
            e += s * z;
        }
        let active = engine.step(k as u64, e);
        out.time_axis.push(t);
        for i in 0..n_paths {
            out.phases[i].push(active == Some(i));
            out.per_path_cap_voltages[i].push(engine.caps[i]);
        }
        out.combined_baseband.push(engine.baseband());
        if let (Some(q), Some(v)) = (out.quadrature.as_mut(), engine.quadrature()) {
            q.push(v);
        }
        out.input_waveform.push(e);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conversion {
    /// Baseband amplitude over RF amplitude, dB.
    pub gain: f64,
    /// Hz
    pub if_freq: f64,
    /// Wanted over image sideband in the complex baseband, dB; 0 without a quadrature output.
    pub image_rejection: f64,
}

/// Windowed-FFT conversion measurement on the steady-state part of a run.
pub fn measure_conversion(result: &NpathRunResult, f_rf: f64, f_lo: f64) -> Result<Conversion> {
    let fs = result.sample_rate;
    let s = result.settle_samples;
    let bb = &result.combined_baseband[s..];
    let expected = (f_rf - f_lo).abs();
    let record = bb.len() as f64 / fs;
    let resolution = 8.0 / record;
    if expected < resolution {
        return Err(Error::Resolution { if_freq: expected, resolution });
    }
    let span = 4;
    let out = AmplitudeSpectrum::of_real(bb, fs);
    let (if_freq, out_mag) = out.peak_near(expected, span);
    let inp = AmplitudeSpectrum::of_real(&result.input_waveform[s..], fs);
    let (_, in_mag) = inp.peak_near(f_rf, span);
    if in_mag <= 0.0 {
        return Err(Error::domain("input", "no tone found at f_rf"));
    }
    let image_rejection = match &result.quadrature {
        Some(q) => {
            let z: Vec<Complex64> = bb.iter().zip(&q[s..]).map(|(&i, &q)| Complex64::new(i, -q)).collect();
            let zs = AmplitudeSpectrum::of_complex(&z, fs);
            let sign = if f_rf >= f_lo { 1.0 } else { -1.0 };
            let (_, wanted) = zs.peak_near(sign * expected, span);
            let (_, image) = zs.peak_near(-sign * expected, span);
            db_from_amplitude(wanted / image.max(f64::MIN_POSITIVE))
        }
        None => 0.0,
    };
    Ok(Conversion { gain: db_from_amplitude(out_mag / in_mag), if_freq, image_rejection })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LO: f64 = 100e6;
    const FS: f64 = 64.0 * LO;

    fn mixer(n_paths: usize, duty: f64) -> MixerDesign {
        MixerDesign { n_paths, duty, lo_freq: LO, baseband_cap: 50e-12, ..Default::default() }
    }

    #[test]
    fn nlo_non_overlap_and_duty() {
        let fs = 32.0 * LO;
        let w = gen_nlo(4, 0.25, LO, fs, 3200).unwrap();
        for k in 0..3200 {
            assert_eq!(w.phases.iter().filter(|p| p[k]).count(), 1);
        }
        let w2 = gen_nlo(2, 0.25, LO, fs, 3200).unwrap();
        let idle = (0..3200).filter(|&k| !w2.phases[0][k] && !w2.phases[1][k]).count();
        assert_eq!(idle, 1600);
        assert!(w2.phases[0][0]);
        // phase 1 is phase 0 shifted by half an LO period
        assert!((0..3184).all(|k| w2.phases[1][k + 16] == w2.phases[0][k]));
        let w1 = gen_nlo(1, 1.0, LO, FS, 100).unwrap();
        assert!(w1.phases[0].iter().all(|&b| b));
        assert!(matches!(gen_nlo(4, 0.25, LO, 16.0 * LO, 10), Err(Error::Undersampled { .. })));
        assert!(gen_nlo(4, 0.3, LO, fs, 10).is_err());
    }

    #[test]
    fn tone_at_lo_rectifies_to_fixed_pattern() {
        let m = mixer(4, 0.25);
        let r = simulate_npath(&m, &Input::tone(LO, 1.0), 4e-6, FS, 0).unwrap();
        let n = r.combined_baseband.len();
        let a = r.per_path_cap_voltages[0][n - 1];
        let b = r.per_path_cap_voltages[0][n - 1 - 6400];
        assert!((a - b).abs() < 1e-9);
        assert!(a > 0.5);
    }

    #[test]
    fn dc_charges_every_cap_monotonically() {
        let m = MixerDesign { rsw_unit: 0.0, ..mixer(4, 0.25) };
        let r = simulate_npath(&m, &Input::tone(0.0, 0.8), 1e-6, FS, 0).unwrap();
        for caps in &r.per_path_cap_voltages {
            assert!(caps.windows(2).all(|w| w[1] >= w[0] && w[1] <= 0.8 + 1e-15));
            assert!((caps.last().unwrap() - 0.8).abs() < 1e-3);
        }
    }

    #[test]
    fn disconnected_caps_hold_exactly() {
        let m = mixer(2, 0.25);
        let r = simulate_npath(&m, &Input::tone(LO + 1e6, 1.0), 1e-6, FS, 0).unwrap();
        for (i, caps) in r.per_path_cap_voltages.iter().enumerate() {
            for k in 1..caps.len() {
                if !r.phases[i][k] {
                    assert_eq!(caps[k].to_bits(), caps[k - 1].to_bits());
                }
            }
        }
    }

    #[test]
    fn downconverts_to_offset() {
        let m = mixer(2, 0.25);
        let r = simulate_npath(&m, &Input::tone(LO + 1e6, 1.0), 20e-6, FS, 0).unwrap();
        let c = measure_conversion(&r, LO + 1e6, LO).unwrap();
        let bin = FS / (r.combined_baseband.len() - r.settle_samples) as f64;
        assert!((c.if_freq - 1e6).abs() <= 1.01 * bin);
        // ideal two-path 25% mixer: 2 sinc(pi/4) in voltage less switch loss
        assert!((c.gain - 5.1).abs() < 0.3, "{}", c.gain);
        assert_eq!(c.image_rejection, 0.0);
    }

    #[test]
    fn gain_is_amplitude_invariant() {
        let m = mixer(2, 0.25);
        let g = |a: f64| {
            let r = simulate_npath(&m, &Input::tone(LO + 2e6, a), 10e-6, FS, 0).unwrap();
            measure_conversion(&r, LO + 2e6, LO).unwrap().gain
        };
        assert!((g(0.01) - g(0.1)).abs() < 0.1);
    }

    #[test]
    fn four_path_rejects_image() {
        let m = mixer(4, 0.25);
        let r = simulate_npath(&m, &Input::tone(LO + 1e6, 1.0), 20e-6, FS, 0).unwrap();
        let c = measure_conversion(&r, LO + 1e6, LO).unwrap();
        assert!(c.image_rejection > 30.0, "{}", c.image_rejection);
    }

    #[test]
    fn time_shift_covariance() {
        let m = mixer(2, 0.25);
        let f = LO + 3e6;
        let a = simulate_npath(&m, &Input::tone(f, 1.0), 4e-6, FS, 0).unwrap();
        let b = simulate_npath(&m, &Input::Tone { freq: f, amplitude: 1.0, phase: -2.0 * PI * f / LO }, 4e-6, FS, 0).unwrap();
        let p = 64;
        let n = a.combined_baseband.len();
        for k in n / 2..n {
            assert!((b.combined_baseband[k] - a.combined_baseband[k - p]).abs() < 1e-9);
        }
    }

    #[test]
    fn halving_timestep_changes_rms_little() {
        let m = mixer(2, 0.25);
        let rms = |fs: f64| {
            let r = simulate_npath(&m, &Input::tone(LO + 1e6, 1.0), 8e-6, fs, 0).unwrap();
            let s = &r.combined_baseband[r.settle_samples..];
            (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt()
        };
        let a = rms(128.0 * LO);
        let b = rms(256.0 * LO);
        assert!((a / b - 1.0).abs() < 0.005);
    }

    #[test]
    fn bandpass_character() {
        let m = mixer(2, 0.25);
        let fc = m.corner_freq().unwrap();
        let g = |df: f64| {
            let r = simulate_npath(&m, &Input::tone(LO + df, 1.0), 40.0 / df + 2e-6, FS, 0).unwrap();
            measure_conversion(&r, LO + df, LO).unwrap().gain
        };
        let near = g(1.5 * fc / 10.0);
        let far = g(1.5 * fc);
        assert!(near > far + 5.0);
    }

    #[test]
    fn noise_input_is_seeded() {
        let m = mixer(2, 0.25);
        let inp = Input::Sum(vec![Input::tone(LO + 1e6, 0.1), Input::Noise { psd: 1e-15 }]);
        let a = simulate_npath(&m, &inp, 1e-6, FS, 5).unwrap();
        let b = simulate_npath(&m, &inp, 1e-6, FS, 5).unwrap();
        let c = simulate_npath(&m, &inp, 1e-6, FS, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.combined_baseband, c.combined_baseband);
    }

    #[test]
    fn rejects_bad_runs() {
        let m = mixer(2, 0.25);
        assert!(matches!(
            simulate_npath(&m, &Input::tone(10.0 * LO, 1.0), 1e-6, FS, 0),
            Err(Error::Undersampled { .. })
        ));
        assert!(simulate_npath(&m, &Input::tone(LO, 1.0), 0.0, FS, 0).is_err());
        assert!(simulate_npath(&m, &Input::tone(LO, 1.0), 1e-7, FS, 0).is_err());
    }
}
