//! Windowed FFT helpers for tone amplitude and noise PSD estimates.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const FLAT_TOP: [f64; 5] = [0.21557895, 0.41663158, 0.277263158, 0.083578947, 0.006947368];

pub const WINDOW_NAME: &str = "flat-top";

pub fn flat_top(n: usize) -> Vec<f64> {
    let m = n as f64;
    (0..n)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / m;
            FLAT_TOP[0] - FLAT_TOP[1] * x.cos() + FLAT_TOP[2] * (2.0 * x).cos()
                - FLAT_TOP[3] * (3.0 * x).cos()
                + FLAT_TOP[4] * (4.0 * x).cos()
        })
        .collect()
}

pub fn hann(n: usize) -> Vec<f64> {
    let m = n as f64;
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / m).cos()).collect()
}

/// Largest length <= n whose only prime factors are 2, 3 and 5.
pub fn smooth_length(n: usize) -> usize {
    let is_smooth = |mut m: usize| {
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        m == 1
    };
    (1..=n.max(1)).rev().find(|&m| is_smooth(m)).unwrap_or(1)
}

/// Flat-top windowed spectrum scaled so a bin magnitude reads tone amplitude.
pub struct AmplitudeSpectrum {
    pub bins: Vec<Complex64>,
    pub resolution: f64,
}

impl AmplitudeSpectrum {
    pub fn of_complex(x: &[Complex64], sample_rate: f64) -> Self {
        let n = smooth_length(x.len());
        let start = x.len() - n;
        let w = flat_top(n);
        let gain: f64 = w.iter().sum();
        let mut buf: Vec<Complex64> = x[start..].iter().zip(&w).map(|(v, w)| v * w).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        for b in &mut buf {
            *b /= gain;
        }
        Self { bins: buf, resolution: sample_rate / n as f64 }
    }

    pub fn of_real(x: &[f64], sample_rate: f64) -> Self {
        let c: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::of_complex(&c, sample_rate)
    }

    /// Signed frequency to bin index (negative frequencies wrap).
    fn bin_of(&self, freq: f64) -> isize {
        (freq / self.resolution).round() as isize
    }

    fn at(&self, k: isize) -> Complex64 {
        let n = self.bins.len() as isize;
        self.bins[k.rem_euclid(n) as usize]
    }

    /// Peak within `span` bins of `freq`; returns (frequency, magnitude).
    /// Real-signal amplitudes are twice the returned magnitude.
    pub fn peak_near(&self, freq: f64, span: isize) -> (f64, f64) {
        let c = self.bin_of(freq);
        let (k, m) = (c - span..=c + span)
            .map(|k| (k, self.at(k).norm()))
            .fold((c, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
        (k as f64 * self.resolution, m)
    }
}

/// Streaming Welch PSD estimate with a Hann window and no overlap.
pub struct Welch {
    segment: usize,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    filled: usize,
    acc: Vec<f64>,
    segments: usize,
    sample_rate: f64,
}

impl Welch {
    pub fn new(segment: usize, sample_rate: f64) -> Self {
        Self {
            segment,
            window: hann(segment),
            fft: FftPlanner::new().plan_fft_forward(segment),
            buf: vec![Complex64::default(); segment],
            filled: 0,
            acc: vec![0.0; segment / 2 + 1],
            segments: 0,
            sample_rate,
        }
    }

    pub fn push(&mut self, x: f64) {
        self.buf[self.filled] = Complex64::new(x * self.window[self.filled], 0.0);
        self.filled += 1;
        if self.filled == self.segment {
            self.fft.process(&mut self.buf);
            for (a, b) in self.acc.iter_mut().zip(&self.buf) {
                *a += b.norm_sqr();
            }
            self.filled = 0;
            self.segments += 1;
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn resolution(&self) -> f64 {
        self.sample_rate / self.segment as f64
    }

    /// One-sided PSD, units^2/Hz, averaged over completed segments.
    pub fn psd(&self) -> Vec<f64> {
        let w2: f64 = self.window.iter().map(|w| w * w).sum();
        let scale = 2.0 / (self.sample_rate * w2 * self.segments.max(1) as f64);
        self.acc.iter().map(|a| a * scale).collect()
    }

    /// Mean one-sided PSD over bins whose frequency lies in [lo, hi].
    pub fn band_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let df = self.resolution();
        let psd = self.psd();
        let k0 = (lo / df).ceil().max(1.0) as usize;
        let k1 = ((hi / df).floor() as usize).min(psd.len() - 1);
        (k1 >= k0).then(|| psd[k0..=k1].iter().sum::<f64>() / (k1 - k0 + 1) as f64)
    }
}
