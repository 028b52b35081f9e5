//! Analytic BER of envelope-detected OOK.
//!
//! SNR is average signal power over the noise variance per real dimension,
//! the same definition used for the coherent slicer. With unit noise
//! variance the on-level amplitude is `a = sqrt(2 SNR)`; an "off" bit gives a
//! Rayleigh envelope, an "on" bit a Rice envelope with parameter `a`.

use crate::special::{golden_section_min, rice_cdf};
use crate::units::ratio_from_db;

fn on_amplitude(snr_db: f64) -> f64 {
    (2.0 * ratio_from_db(snr_db)).sqrt()
}

/// BER for equiprobable bits with a slicer threshold expressed as a fraction
/// of the on-level amplitude.
pub fn ber_at_threshold(snr_db: f64, threshold_fraction: f64) -> f64 {
    let a = on_amplitude(snr_db);
    ber_at_absolute(a, threshold_fraction * a)
}

fn ber_at_absolute(a: f64, t: f64) -> f64 {
    let miss = rice_cdf(t, a);
    let false_alarm = (-0.5 * t * t).exp();
    0.5 * (miss + false_alarm)
}

fn optimum(snr_db: f64) -> (f64, f64, f64) {
    let a = on_amplitude(snr_db);
    // the likelihood ratio is monotone in t, so the BER is unimodal in t
    let (t, ber) = golden_section_min(0.0, a + 8.0, 1e-10, |t| ber_at_absolute(a, t));
    (a, t, ber)
}

/// Threshold (fraction of on-level amplitude) minimising the BER.
pub fn optimal_threshold(snr_db: f64) -> f64 {
    let (a, t, _) = optimum(snr_db);
    t / a
}

/// BER with the optimal threshold.
pub fn optimal_ber(snr_db: f64) -> f64 {
    optimum(snr_db).2
}
