//! Heat and free Schrodinger kernels, free evolution through the lens
//! transform, and the norm transport between the two flows.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dunkl::DunklStructure;
use crate::error::{DunklError, Result};
use crate::hermite::{kernel_kit, StateVector};
use crate::quadrature::{weighted_lp_norm, TensorGrid, TimeRule};

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Dunkl heat kernel `M (2t)^{-s} e^{-(|x|^2+|y|^2)/4t} E(x/2t, y)`.
pub fn heat_kernel(s: &DunklStructure, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    s.check_point(x)?;
    s.check_point(y)?;
    if !(t > 0.0) {
        return Err(DunklError::NonPositiveTime(t));
    }
    let (e, log_scale) = s.kernel_scaled(Complex64::new(0.5 / t, 0.0), x, y);
    let log = s.m_kappa().ln() - s.half_d_eff() * (2.0 * t).ln()
        - (sq_norm(x) + sq_norm(y)) / (4.0 * t)
        + log_scale;
    Ok(log.exp() * e.re)
}

/// `M (2 tau)^{-s} e^{-(|x|^2+|y|^2)/(4 tau)} E(x/(2 tau), y)` for complex
/// time `tau` with `Re tau >= 0`, principal branch. `tau = it` gives the kernel
/// of `e^{it Delta}`, real `tau > 0` the heat kernel.
pub fn free_kernel(s: &DunklStructure, tau: Complex64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    s.check_point(x)?;
    s.check_point(y)?;
    if tau.norm() == 0.0 {
        return Err(DunklError::SingularTime { t: 0.0, distance: 0.0 });
    }
    if tau.re < 0.0 {
        return Err(DunklError::Unsupported(format!(
            "free kernel needs Re(tau) >= 0, got {tau}"
        )));
    }
    let inv = 1.0 / (2.0 * tau);
    let (e, log_scale) = s.kernel_scaled(inv, x, y);
    let log = s.m_kappa().ln() - s.half_d_eff() * (2.0 * tau).ln() - 0.5 * inv * (sq_norm(x) + sq_norm(y))
        + log_scale;
    Ok(log.exp() * e)
}

/// Kernel of `e^{it Delta_kappa}`.
pub fn kernel_lit(s: &DunklStructure, t: f64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    if t == 0.0 {
        return Err(DunklError::SingularTime { t, distance: 0.0 });
    }
    free_kernel(s, Complex64::new(0.0, t), x, y)
}

/// Substitution `v = tan 2t` relating the oscillator flow at time `t` to the
/// free flow at time `v/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensMap {
    pub v: f64,
    /// `arctan(v) / 2`.
    pub t_hermite: f64,
    /// `(1+v^2)^{1/2}`.
    pub scale: f64,
    /// `(1+v^2)^{d_eff/4}`.
    pub amplitude: f64,
    /// Coefficient of `|x|^2` in the quadratic phase, `v/2`.
    pub phase: f64,
}

impl LensMap {
    pub fn new(v: f64, d_eff: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(DunklError::NonPositiveTime(v));
        }
        let scale = (1.0 + v * v).sqrt();
        Ok(Self {
            v,
            t_hermite: 0.5 * v.atan(),
            scale,
            amplitude: scale.powf(0.5 * d_eff),
            phase: 0.5 * v,
        })
    }

    /// Lens map for free time `t > 0` (so `v = 2t`).
    pub fn for_free_time(t: f64, d_eff: f64) -> Result<Self> {
        Self::new(2.0 * t, d_eff)
    }
}

/// `|K_{i t_H}(x,y) - A e^{-iv|x|^2/2} L_{iv/2}(x sqrt(1+v^2), y)|`.
pub fn lens_relation_residual(s: &DunklStructure, v: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    let lens = LensMap::new(v, s.d_eff())?;
    let k = kernel_kit(s, lens.t_hermite, x, y)?;
    let xs: Vec<f64> = x.iter().map(|v| v * lens.scale).collect();
    let l = kernel_lit(s, lens.phase, &xs, y)?;
    let rhs = lens.amplitude * Complex64::from_polar(1.0, -lens.phase * sq_norm(x)) * l;
    Ok((k - rhs).norm())
}

/// `(e^{it Delta} u)(X)` at each point, through the exact lens relation with
/// the diagonal oscillator propagator. Negative `t` uses
/// `e^{it Delta} u = conj(e^{-it Delta} conj u)`.
pub fn free_evolve(u: &StateVector, t: f64, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    if t == 0.0 {
        return Ok(points.iter().map(|x| u.evaluate(x)).collect());
    }
    if t < 0.0 {
        let v = free_evolve(&u.conj(), -t, points)?;
        return Ok(v.into_iter().map(|c| c.conj()).collect());
    }
    let lens = LensMap::for_free_time(t, u.basis().structure().d_eff())?;
    let w = u.propagate(lens.t_hermite);
    Ok(points
        .iter()
        .map(|p| {
            let x: Vec<f64> = p.iter().map(|v| v / lens.scale).collect();
            let phase = Complex64::from_polar(1.0 / lens.amplitude, lens.phase * sq_norm(&x));
            phase * w.evaluate(&x)
        })
        .collect())
}

/// [`free_evolve`] at time `v/2`.
pub fn free_evolve_via_lens(v: f64, u: &StateVector, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    if !(v > 0.0) {
        return Err(DunklError::NonPositiveTime(v));
    }
    free_evolve(u, 0.5 * v, points)
}

/// Smallest `|t|` at which kernel quadrature is trusted.
pub const KERNEL_QUADRATURE_MIN_TIME: f64 = 0.05;

/// `int L_{it}(X, y) u(y) h^2(y) dy` by quadrature on `grid` scaled by `sqrt 2`
/// (so that `u ~ e^{-|y|^2/2}` times the rule's Gaussian is polynomial-exact).
pub fn free_evolve_kernel_quadrature(
    u: &StateVector,
    t: f64,
    grid: &TensorGrid,
    points: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    if t.abs() < KERNEL_QUADRATURE_MIN_TIME {
        return Err(DunklError::Unsupported(format!(
            "kernel quadrature needs |t| >= {KERNEL_QUADRATURE_MIN_TIME}, got {t}"
        )));
    }
    let s = u.basis().structure();
    kernel_quadrature(u, grid, points, |x, y| kernel_lit(s, t, x, y))
}

/// `int K_{it}(x, y) u(y) h^2(y) dy` by quadrature, the kernel-side oscillator propagator.
pub fn hermite_evolve_kernel_quadrature(
    u: &StateVector,
    t: f64,
    grid: &TensorGrid,
    points: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let s = u.basis().structure();
    kernel_quadrature(u, grid, points, |x, y| kernel_kit(s, t, x, y))
}

fn kernel_quadrature(
    u: &StateVector,
    grid: &TensorGrid,
    points: &[Vec<f64>],
    kernel: impl Fn(&[f64], &[f64]) -> Result<Complex64>,
) -> Result<Vec<Complex64>> {
    let g = grid.scaled(std::f64::consts::SQRT_2);
    let uy: Vec<Complex64> = g.points().iter().map(|y| u.evaluate(y)).collect();
    points
        .iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((y, w), val) in g.points().iter().zip(g.free_weights()).zip(&uy) {
                acc += kernel(x, y)? * val * *w;
            }
            Ok(acc)
        })
        .collect()
}

/// `|| |e^{-itH} u|^2 ||_{L^q_kappa}` on the basis grid.
pub fn hermite_density_norm(u: &StateVector, t: f64, q: f64) -> Result<f64> {
    let rho: Vec<f64> = u.propagate(t).evaluate_grid().iter().map(|c| c.norm_sqr()).collect();
    weighted_lp_norm(u.basis().grid(), &rho, q)
}

/// `|| |e^{it Delta} u|^2 ||_{L^q_kappa}`, sampled on the basis grid dilated by
/// the lens scale so that the evolved density is resolved.
pub fn free_density_norm(u: &StateVector, t: f64, q: f64) -> Result<f64> {
    if t == 0.0 {
        return hermite_density_norm(u, 0.0, q);
    }
    if t < 0.0 {
        return free_density_norm(&u.conj(), -t, q);
    }
    let lens = LensMap::for_free_time(t, u.basis().structure().d_eff())?;
    let grid = u.basis().grid().scaled(lens.scale);
    let a2 = lens.amplitude * lens.amplitude;
    // |(e^{it Delta}u)(scale * x)| = |(e^{-i t_H H} u)(x)| / amplitude; the phase drops out.
    let rho: Vec<f64> = u
        .propagate(lens.t_hermite)
        .evaluate_grid()
        .iter()
        .map(|c| c.norm_sqr() / a2)
        .collect();
    weighted_lp_norm(&grid, &rho, q)
}

/// Both sides of the norm transport between the oscillator flow and the free flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTransport {
    /// `int_0^{pi/4} ||rho_H(t)||_q^p dt`.
    pub lhs: f64,
    /// `int_0^inf ||rho_Delta(s)||_q^p ds` through `s = tan(theta)`.
    pub rhs: f64,
    /// `int_{-pi}^{pi} ||rho_H(t)||_q^p dt`.
    pub torus: f64,
    /// `4 int_R ||rho_Delta(s)||_q^p ds`.
    pub line_times_four: f64,
}

impl NormTransport {
    pub fn relative_gap(&self) -> f64 {
        rel_gap(self.lhs, self.rhs)
    }

    pub fn factor_four_gap(&self) -> f64 {
        rel_gap(self.torus, self.line_times_four)
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Quadrature sizes for [`norm_transport_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    /// Gauss-Legendre nodes per panel on `(0, pi/4)`.
    pub gauss_nodes: usize,
    pub panels: usize,
    /// Trapezoid nodes on `(-pi, pi)`.
    pub torus_nodes: usize,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            gauss_nodes: 16,
            panels: 8,
            torus_nodes: 512,
        }
    }
}

/// Computes both sides of the oscillator/free norm transport for `u` at
/// exponents `(p, q)`. For `p = inf` the time integrals become suprema.
pub fn norm_transport_check(u: &StateVector, p: f64, q: f64, opts: TransportOptions) -> Result<NormTransport> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(DunklError::InvalidExponent(format!("p = {p}, q = {q}")));
    }
    let half = TimeRule::composite_gauss_legendre(0.0, FRAC_PI_4, opts.panels, opts.gauss_nodes);
    let torus = TimeRule::periodic(-PI, PI, opts.torus_nodes);
    let combine = |rule: &TimeRule, vals: &[f64], jac: &dyn Fn(f64) -> f64| -> f64 {
        if p.is_infinite() {
            vals.iter().fold(0.0, |m: f64, v| m.max(*v))
        } else {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .zip(vals)
                .map(|((&t, &w), v)| w * jac(t) * v.powf(p))
                .sum()
        }
    };
    let h_vals = half
        .nodes
        .iter()
        .map(|&t| hermite_density_norm(u, t, q))
        .collect::<Result<Vec<_>>>()?;
    let lhs = combine(&half, &h_vals, &|_| 1.0);

    // free side on its own nodes: s = tan(theta), ds = sec^2(theta) d theta
    let line = TimeRule::composite_gauss_legendre(0.0, FRAC_PI_2, opts.panels, opts.gauss_nodes);
    let jac = |th: f64| 1.0 / th.cos().powi(2);
    let fwd = line
        .nodes
        .iter()
        .map(|&th| free_density_norm(u, th.tan(), q))
        .collect::<Result<Vec<_>>>()?;
    let bwd = line
        .nodes
        .iter()
        .map(|&th| free_density_norm(u, -th.tan(), q))
        .collect::<Result<Vec<_>>>()?;
    let rhs = combine(&line, &fwd, &jac);
    let rhs_back = combine(&line, &bwd, &jac);

    let t_vals = torus
        .nodes
        .iter()
        .map(|&t| hermite_density_norm(u, t, q))
        .collect::<Result<Vec<_>>>()?;
    let torus_int = combine(&torus, &t_vals, &|_| 1.0);
    let line_times_four = if p.is_infinite() {
        rhs.max(rhs_back)
    } else {
        4.0 * (rhs + rhs_back)
    };
    Ok(NormTransport {
        lhs,
        rhs,
        torus: torus_int,
        line_times_four,
    })
}

/// Period of `t -> ||rho_H(t)||` (the density moves by a reflection under `t -> t + pi/2`).
pub const DENSITY_NORM_PERIOD: f64 = FRAC_PI_2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_heat_kernel() {
        let s = DunklStructure::new(vec![0.0]).unwrap();
        let (t, x, y): (f64, f64, f64) = (0.5, 1.0, 0.0);
        let want = (-(x - y) * (x - y) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
        assert!((heat_kernel(&s, t, &[x], &[y]).unwrap() - want).abs() < 1e-14);
        assert!(heat_kernel(&s, 0.0, &[x], &[y]).is_err());
    }

    #[test]
    fn lens_map_invariants() {
        let l = LensMap::new(1.7, 3.0).unwrap();
        assert!(((2.0 * l.t_hermite).tan() - 1.7).abs() < 1e-14);
        assert!((l.amplitude - l.scale.powf(1.5)).abs() < 1e-14);
        assert!(LensMap::new(0.0, 1.0).is_err());
    }

    #[test]
    fn lit_conjugation() {
        let s = DunklStructure::new(vec![1.0, 0.5]).unwrap();
        let (x, y) = ([0.4, -1.1], [0.9, 0.3]);
        let a = kernel_lit(&s, 0.7, &x, &y).unwrap();
        let b = kernel_lit(&s, -0.7, &x, &y).unwrap();
        assert!((a.conj() - b).norm() < 1e-13 * a.norm());
    }
}
