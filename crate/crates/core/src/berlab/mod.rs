//! Monte Carlo BER laboratory for the OOK link: 8b/10b framing, modulation,
//! AWGN and detection, with Wilson confidence intervals.
//!
//! BER is counted on channel bits, before 8b/10b decoding. A byte-error
//! count from a disparity-agnostic table decode is reported alongside.

pub mod envelope;
pub mod line_code;
pub mod ook;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use line_code::{decode_8b10b, encode_8b10b, Disparity, LineCodeBlock};
pub use ook::{add_awgn, add_complex_awgn, analytic_ber_ook_coherent, ook_demodulate, ook_modulate, OokParams};

use crate::error::{Error, Result};
use crate::linkbudget::Detector;
use crate::rng::{derive_seed, stream_rng, Stream};

/// Channel bits per noise block. Each block draws noise from its own
/// substream so results do not depend on the rayon pool size.
const BLOCK_BITS: usize = 1 << 16;

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerResult {
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber_point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub snr: f64,
    pub seed: u64,
    pub detector: Detector,
    pub bytes_sent: u64,
    pub byte_errors: u64,
}

/// Wilson score interval at 95 % confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Run the full chain payload -> 8b/10b -> OOK -> AWGN -> detector at `snr_db`
/// (average signal power over noise variance per dimension, measured after
/// the per-bit integrate-and-dump).
///
/// For the envelope detector `params.threshold` is replaced by the
/// analytically optimal threshold at `snr_db`.
pub fn run_ber(snr_db: f64, n_bits: usize, params: &OokParams, seed: u64) -> Result<BerResult> {
    if n_bits < 1000 {
        return Err(Error::domain("n_bits", format!("need at least 1000 bits, got {n_bits}")));
    }
    if snr_db.is_nan() {
        return Err(Error::domain("snr", "is NaN"));
    }
    let mut params = *params;
    if params.detector == Detector::Envelope {
        params.threshold = envelope::optimal_threshold(snr_db);
    }
    params.validate()?;

    let n_bytes = n_bits.div_ceil(10);
    let mut rng = stream_rng(seed, Stream::Payload, 0);
    let payload: Vec<u8> = (0..n_bytes).map(|_| rng.random()).collect();
    let block = encode_8b10b(&payload, Disparity::Negative);
    let tx = ook_modulate(&block.encoded, &params);

    // noise variance per sample so that the per-bit mean sees the requested SNR
    let spb = params.samples_per_bit;
    let sample_snr = snr_db - 10.0 * (spb as f64).log10();
    let sigma = ook::noise_sigma(&tx, sample_snr)?;

    let samples_per_block = BLOCK_BITS * spb;
    let detected: Vec<Vec<u8>> = tx
        .par_chunks(samples_per_block)
        .enumerate()
        .map(|(i, chunk)| {
            let block_seed = derive_seed(seed, Stream::Block, i as u64);
            let rx = ook::complex_noise(chunk, sigma, block_seed);
            ook_demodulate(&rx, &params)
        })
        .collect::<Result<_>>()?;
    let rx_bits: Vec<u8> = detected.into_iter().flatten().collect();

    let bit_errors = rx_bits
        .iter()
        .zip(&block.encoded)
        .filter(|(a, b)| a != b)
        .count() as u64;
    let byte_errors = rx_bits
        .chunks_exact(10)
        .zip(&payload)
        .filter(|(group, &byte)| {
            let packed = group.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16);
            line_code::lookup_symbol(packed) != Some(byte)
        })
        .count() as u64;

    let bits_sent = block.encoded.len() as u64;
    let (ci_low, ci_high) = wilson_interval(bit_errors, bits_sent);
    Ok(BerResult {
        bits_sent,
        bit_errors,
        ber_point: bit_errors as f64 / bits_sent as f64,
        ci_low,
        ci_high,
        snr: snr_db,
        seed,
        detector: params.detector,
        bytes_sent: n_bytes as u64,
        byte_errors,
    })
}

/// BER at each SNR with the same seed (common random numbers across points).
pub fn ber_sweep(snrs: &[f64], n_bits: usize, params: &OokParams, seed: u64) -> Result<Vec<BerResult>> {
    snrs.iter().map(|&s| run_ber(s, n_bits, params, seed)).collect()
}
