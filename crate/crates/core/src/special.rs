//! Special functions and 1-D solvers used by the BER and link models.

use statrs::function::erf::erfc;

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on (0, 1) by bisection.
pub fn q_inverse(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    // Q is decreasing: Q(lo) > p > Q(hi)
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for a decreasing function: finds x in [lo, hi] with f(x) = target.
pub fn bisect_decreasing(mut lo: f64, mut hi: f64, tol: f64, target: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimisation of a unimodal function on [a, b]; returns (argmin, min).
pub fn golden_section_min(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Exponentially scaled modified Bessel function of the first kind, e^{-z} I0(z), z >= 0.
pub fn bessel_i0e(z: f64) -> f64 {
    let z = z.abs();
    if z < 25.0 {
        // power series sum (z^2/4)^k / (k!)^2
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        // asymptotic: 1/sqrt(2 pi z) * sum ((2k-1)!!)^2 / (k! (8z)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..12 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            term *= odd * odd / (kf * 8.0 * z);
            sum += term;
        }
        sum / (2.0 * std::f64::consts::PI * z).sqrt()
    }
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre quadrature over [a, b].
pub fn integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

/// CDF of the Rice distribution with unit per-dimension noise variance and line-of-sight
/// amplitude `nu`, evaluated at `t`.
pub fn rice_cdf(t: f64, nu: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let pdf = |x: f64| x * (-0.5 * (x - nu) * (x - nu)).exp() * bessel_i0e(nu * x);
    integrate(0.0, t, 64, pdf).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_known_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        // Q(3.090232306167813) = 1e-3 (mpmath); statrs erfc is good to ~1e-10 relative here
        let q = q_function(3.090_232_306_167_813_5);
        assert!((q / 1e-3 - 1.0).abs() < 1e-9, "{q:e}");
        assert!((q_inverse(1e-3) - 3.090_232_306_167_813_5).abs() < 1e-9);
        assert!((q_inverse(0.5)).abs() < 1e-12);
    }

    #[test]
    fn i0e_matches_series_and_asymptotic_at_boundary() {
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0e(1.0) * 1f64.exp() - 1.266_065_877_752_008_2).abs() < 1e-14);
        // either side of the series/asymptotic switch, mpmath
        assert!((bessel_i0e(24.9) / 0.080_359_332_611_532_21 - 1.0).abs() < 1e-12);
        assert!((bessel_i0e(25.1) / 0.080_035_197_254_296_24 - 1.0).abs() < 1e-12);
        // e^{-30} I0(30), mpmath
        assert!((bessel_i0e(30.0) - 0.073_145_946_482_237_4).abs() < 1e-12);
    }

    #[test]
    fn rice_reduces_to_rayleigh_without_los() {
        for t in [0.3f64, 1.0, 2.5] {
            let rayleigh = 1.0 - (-0.5 * t * t).exp();
            assert!((rice_cdf(t, 0.0) - rayleigh).abs() < 1e-12);
        }
        assert!((rice_cdf(30.0, 3.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(-3.0, 5.0, 1e-10, |x| (x - 1.25) * (x - 1.25) + 2.0);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }
}
