//! Special functions: confluent hypergeometric series, orthonormal Laguerre
//! functions and the normalized Bessel functions that build the rank-one
//! Dunkl kernel.

use complex_bessel::{besseli_scaled, besselj_scaled};
use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

const SERIES_MAX_TERMS: usize = 4000;

/// Kummer series `1F1(a; b; z)` summed term by term.
///
/// Only accurate where the terms do not cancel badly; callers route large
/// or strongly oscillating arguments elsewhere.
pub fn hyp1f1_series(a: f64, b: f64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let zabs = z.norm();
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= z * ((a + nf) / ((b + nf) * (nf + 1.0)));
        sum += term;
        if nf > zabs && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if term.norm() == 0.0 {
            break;
        }
    }
    sum
}

/// Orthonormal Laguerre functions `l_m(u) e^{-u/2}`, m = 0..=m_max, for the
/// weight `u^alpha e^{-u}` on (0, inf).
///
/// `l_m = sqrt(m!/Gamma(m+alpha+1)) L_m^alpha`; the recurrence is run on the
/// normalized, Gaussian-damped values so that nothing overflows for large m.
pub fn laguerre_functions(alpha: f64, m_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    let l0 = (-0.5 * u - 0.5 * ln_gamma(alpha + 1.0)).exp();
    out.push(l0);
    if m_max == 0 {
        return out;
    }
    let l1 = (1.0 + alpha - u) / (alpha + 1.0).sqrt() * l0;
    out.push(l1);
    for m in 1..m_max {
        let mf = m as f64;
        let next = ((2.0 * mf + alpha + 1.0 - u) * out[m] - (mf * (mf + alpha)).sqrt() * out[m - 1])
            / ((mf + 1.0) * (mf + 1.0 + alpha)).sqrt();
        out.push(next);
    }
    out
}

/// `psi_alpha(z) = Gamma(alpha+1) sum_m (z^2/4)^m / (m! (alpha+1)_m)`, the
/// even entire function `Gamma(alpha+1) (z/2)^{-alpha} I_alpha(z)`, returned
/// scaled by `e^{-|Re z|}`.
pub fn normalized_bessel_scaled(alpha: f64, z: Complex64) -> Complex64 {
    if z.norm() < 1e-8 {
        let e = (-z.re.abs()).exp();
        return (Complex64::new(1.0, 0.0) + z * z / (4.0 * (alpha + 1.0))) * e;
    }
    let g = gamma(alpha + 1.0);
    if z.re.abs() >= z.im.abs() {
        let w = if z.re >= 0.0 { z } else { -z };
        let i = besseli_scaled(alpha, w).expect("modified Bessel evaluation failed");
        (w / 2.0).powc(Complex64::new(-alpha, 0.0)) * i * g
    } else {
        // I_alpha(z) through J_alpha(w) with w = +-iz on the right half-plane.
        let w = if z.im <= 0.0 {
            Complex64::i() * z
        } else {
            -Complex64::i() * z
        };
        let j = besselj_scaled(alpha, w).expect("Bessel evaluation failed");
        (w / 2.0).powc(Complex64::new(-alpha, 0.0)) * j * g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hyp1f1_trivial_cases() {
        let z = Complex64::new(0.7, -0.2);
        // 1F1(a; a; z) = e^z
        let v = hyp1f1_series(1.3, 1.3, z);
        assert!((v - z.exp()).norm() < 1e-14);
        // 1F1(0; b; z) = 1
        assert_eq!(hyp1f1_series(0.0, 2.0, z), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn laguerre_matches_explicit_low_orders() {
        let alpha = 0.5;
        let u = 1.7;
        let l = laguerre_functions(alpha, 2, u);
        let damp = (-u / 2.0).exp();
        let c0 = 1.0 / gamma(alpha + 1.0).sqrt();
        assert_relative_eq!(l[0], c0 * damp, max_relative = 1e-14);
        let c1 = (1.0 / gamma(alpha + 2.0)).sqrt();
        assert_relative_eq!(l[1], c1 * (1.0 + alpha - u) * damp, max_relative = 1e-13);
        let c2 = (2.0 / gamma(alpha + 3.0)).sqrt();
        let lag2 = 0.5 * (u * u - 2.0 * (alpha + 2.0) * u + (alpha + 1.0) * (alpha + 2.0));
        assert_relative_eq!(l[2], c2 * lag2 * damp, max_relative = 1e-13);
    }

    #[test]
    fn normalized_bessel_half_order_is_hyperbolic() {
        // psi_{-1/2}(z) = cosh z, psi_{1/2}(z) = sinh z / z
        for &z in &[
            Complex64::new(3.0, 0.0),
            Complex64::new(-2.5, 0.1),
            Complex64::new(0.0, 7.0),
            Complex64::new(0.3, -12.0),
        ] {
            let scale = z.re.abs().exp();
            let a = normalized_bessel_scaled(-0.5, z) * scale;
            assert!((a - z.cosh()).norm() < 1e-13 * z.cosh().norm().max(1.0), "{z}");
            let b = normalized_bessel_scaled(0.5, z) * scale;
            let want = z.sinh() / z;
            assert!((b - want).norm() < 1e-13 * want.norm().max(1.0), "{z}");
        }
    }
}
