//! OOK modulation, AWGN impairment and the two detectors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::linkbudget::Detector;
use crate::rng::{stream_rng, Stream};
use crate::special::q_function;
use crate::units::ratio_from_db;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OokParams {
    /// Normalised on-level amplitude.
    pub amplitude_on: f64,
    pub bit_rate: f64,
    pub samples_per_bit: usize,
    pub detector: Detector,
    /// Slicer threshold as a fraction of `amplitude_on`.
    pub threshold: f64,
}

impl Default for OokParams {
    fn default() -> Self {
        Self {
            amplitude_on: 1.0,
            bit_rate: 300e3,
            samples_per_bit: 1,
            detector: Detector::CoherentThreshold,
            threshold: 0.5,
        }
    }
}

impl OokParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("amplitude_on", self.amplitude_on)?;
        ensure_positive("bit_rate", self.bit_rate)?;
        if self.samples_per_bit == 0 {
            return Err(Error::domain("samples_per_bit", "must be at least 1"));
        }
        let upper = match self.detector {
            Detector::CoherentThreshold => 1.0,
            // the optimal envelope threshold exceeds the on level below ~0 dB SNR
            Detector::Envelope => f64::INFINITY,
        };
        if !(self.threshold > 0.0 && self.threshold < upper) {
            return Err(Error::domain(
                "threshold",
                format!("must lie in (0, {upper}), got {}", self.threshold),
            ));
        }
        Ok(())
    }
}

/// Rectangular NRZ OOK: bit 1 -> `amplitude_on`, bit 0 -> 0. Rate equals
/// occupied bandwidth (one bit per baseband Nyquist interval).
pub fn ook_modulate(bits: &[u8], params: &OokParams) -> Vec<f64> {
    let spb = params.samples_per_bit;
    let mut out = Vec::with_capacity(bits.len() * spb);
    for &b in bits {
        let level = if b != 0 { params.amplitude_on } else { 0.0 };
        out.extend(std::iter::repeat_n(level, spb));
    }
    out
}

pub(crate) fn mean_power(samples: &[f64]) -> f64 {
    samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64
}

/// Noise standard deviation per real dimension for a requested per-sample SNR.
pub(crate) fn noise_sigma(samples: &[f64], snr_db: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("samples", "empty input"));
    }
    let power = mean_power(samples);
    if power <= 0.0 {
        return Err(Error::domain("samples", "input has zero power"));
    }
    Ok((power / ratio_from_db(snr_db)).sqrt())
}

pub(crate) fn real_noise_into(out: &mut [f64], sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = stream_rng(seed, Stream::InPhase, 0);
    for s in out.iter_mut() {
        let n: f64 = rng.sample(StandardNormal);
        *s += sigma * n;
    }
}

/// Add white Gaussian noise so that mean signal power over noise variance
/// equals `snr_db`. An infinite SNR returns the input unchanged.
pub fn add_awgn(samples: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    let sigma = noise_sigma(samples, snr_db)?;
    let mut out = samples.to_vec();
    real_noise_into(&mut out, sigma, seed);
    Ok(out)
}

pub(crate) fn complex_noise(samples: &[f64], sigma: f64, seed: u64) -> Vec<Complex64> {
    let mut re = samples.to_vec();
    real_noise_into(&mut re, sigma, seed);
    let mut rng = stream_rng(seed, Stream::Quadrature, 0);
    re.into_iter()
        .map(|r| {
            let q: f64 = if sigma == 0.0 { 0.0 } else { sigma * rng.sample::<f64, _>(StandardNormal) };
            Complex64::new(r, q)
        })
        .collect()
}

/// Complex-baseband version of [`add_awgn`]: the in-phase noise is identical
/// to what [`add_awgn`] produces for the same seed; the quadrature component
/// has the same variance and comes from an independent substream.
pub fn add_complex_awgn(samples: &[f64], snr_db: f64, seed: u64) -> Result<Vec<Complex64>> {
    let sigma = noise_sigma(samples, snr_db)?;
    Ok(complex_noise(samples, sigma, seed))
}

/// Slice per-bit integrate-and-dump outputs. Coherent: real part against
/// `threshold * amplitude_on`. Envelope: magnitude of the per-bit complex
/// mean against the same product. Values exactly at the threshold decode to 0.
pub fn ook_demodulate<S: Copy + Into<Complex64>>(samples: &[S], params: &OokParams) -> Result<Vec<u8>> {
    let spb = params.samples_per_bit;
    if spb == 0 || samples.len() % spb != 0 {
        return Err(Error::domain(
            "samples",
            format!("length {} is not a multiple of samples_per_bit {spb}", samples.len()),
        ));
    }
    let level = params.threshold * params.amplitude_on;
    let bits = samples
        .chunks_exact(spb)
        .map(|chunk| {
            let mean = chunk.iter().map(|&s| s.into()).sum::<Complex64>() / spb as f64;
            let stat = match params.detector {
                Detector::CoherentThreshold => mean.re,
                Detector::Envelope => mean.norm(),
            };
            u8::from(stat > level)
        })
        .collect();
    Ok(bits)
}

/// BER = Q(sqrt(SNR/2)) for equiprobable OOK with a mid-level slicer.
pub fn analytic_ber_ook_coherent(snr_db: f64) -> f64 {
    if snr_db == f64::NEG_INFINITY {
        return 0.5;
    }
    q_function((ratio_from_db(snr_db) / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut rng = stream_rng(seed, Stream::Payload, 0);
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn modulate_shapes() {
        let p = OokParams { samples_per_bit: 4, ..Default::default() };
        let w = ook_modulate(&[1, 0, 1, 0], &p);
        assert_eq!(w.len(), 16);
        assert_eq!(&w[..5], &[1.0, 1.0, 1.0, 1.0, 0.0]);
        assert!((w.iter().sum::<f64>() / 16.0 - 0.5).abs() < 1e-15);
        assert!(ook_modulate(&[1; 9], &p).iter().all(|&s| s == 1.0));
    }

    #[test]
    fn awgn_contract() {
        let x: Vec<f64> = (0..1000).map(|i| if i % 3 == 0 { 1.0 } else { -0.5 }).collect();
        assert_eq!(add_awgn(&x, f64::INFINITY, 1).unwrap(), x);
        assert_eq!(add_awgn(&x, 3.0, 9).unwrap(), add_awgn(&x, 3.0, 9).unwrap());
        assert_ne!(add_awgn(&x, 3.0, 9).unwrap(), add_awgn(&x, 3.0, 10).unwrap());
        assert!(add_awgn(&[0.0; 8], 3.0, 1).is_err());
        assert!(add_awgn(&[], 3.0, 1).is_err());
    }

    #[test]
    fn awgn_variance_matches_request() {
        let x = vec![1.0; 1_000_000];
        let y = add_awgn(&x, 10.0, 42).unwrap();
        let var = y.iter().map(|v| (v - 1.0) * (v - 1.0)).sum::<f64>() / y.len() as f64;
        assert!((var - 0.1).abs() < 0.001, "{var}");
        let x: Vec<f64> = ook_modulate(&random_bits(200_000, 3), &OokParams::default());
        let y = add_awgn(&x, 7.0, 5).unwrap();
        let noise: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let measured = 10.0 * (mean_power(&x) / mean_power(&noise)).log10();
        assert!((measured - 7.0).abs() < 0.1);
    }

    #[test]
    fn complex_noise_shares_in_phase_stream() {
        let x: Vec<f64> = (0..256).map(|i| (i % 2) as f64).collect();
        let real = add_awgn(&x, 5.0, 77).unwrap();
        let cplx = add_complex_awgn(&x, 5.0, 77).unwrap();
        assert!(real.iter().zip(&cplx).all(|(r, c)| *r == c.re));
        assert!(cplx.iter().any(|c| c.im != 0.0));
    }

    #[test]
    fn noiseless_round_trip_both_detectors() {
        let bits = random_bits(5000, 11);
        for det in [Detector::CoherentThreshold, Detector::Envelope] {
            let p = OokParams { samples_per_bit: 3, detector: det, ..Default::default() };
            let w = ook_modulate(&bits, &p);
            assert_eq!(ook_demodulate(&w, &p).unwrap(), bits);
        }
    }

    #[test]
    fn tie_breaks_to_zero() {
        let p = OokParams { samples_per_bit: 2, ..Default::default() };
        assert_eq!(ook_demodulate(&[0.5, 0.5, 0.5, 0.5], &p).unwrap(), vec![0, 0]);
        assert!(ook_demodulate(&[0.5; 3], &p).is_err());
    }

    #[test]
    fn analytic_coherent_limits() {
        assert!((analytic_ber_ook_coherent(12.81) - 1e-3).abs() < 2e-5);
        assert_eq!(analytic_ber_ook_coherent(f64::NEG_INFINITY), 0.5);
        assert!((analytic_ber_ook_coherent(-200.0) - 0.5).abs() < 1e-9);
        assert_eq!(analytic_ber_ook_coherent(f64::INFINITY), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(OokParams::default().validate().is_ok());
        assert!(OokParams { threshold: 1.0, ..Default::default() }.validate().is_err());
        assert!(OokParams { samples_per_bit: 0, ..Default::default() }.validate().is_err());
        let env = OokParams { detector: Detector::Envelope, threshold: 1.1, ..Default::default() };
        assert!(env.validate().is_ok());
    }
}
