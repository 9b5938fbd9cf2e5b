//! Gaussian rules for `|x|^{2 kappa} e^{-x^2} dx`, tensor grids, time rules
//! and weighted mixed Lebesgue norms.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dunkl::DunklStructure;
use crate::error::{DunklError, Result};
use crate::special::laguerre_functions;

/// Symmetric 1-D rule for `|x|^{2 kappa} e^{-x^2} dx` with `2n` nodes,
/// exact for polynomials of degree `4n - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule1D {
    kappa: f64,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    free_weights: Vec<f64>,
}

impl QuadratureRule1D {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights with `|x|^{2 kappa} e^{-x^2}` absorbed.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `weights[i] * e^{x_i^2}`: integrates `G(x) |x|^{2 kappa} dx` for
    /// Gaussian-decaying `G`.
    pub fn free_weights(&self) -> &[f64] {
        &self.free_weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`, summed over mirror pairs so odd integrands give exactly 0.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.order;
        (0..n)
            .map(|i| {
                let j = 2 * n - 1 - i;
                self.weights[j] * (f(self.nodes[j]) + f(self.nodes[i]))
            })
            .sum()
    }
}

fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
        if i + 1 < n {
            j[(i, i + 1)] = off[i];
            j[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Gauss-Laguerre nodes for `u^alpha e^{-u}` with `weights * e^{u}`.
fn gauss_laguerre_free(alpha: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..n)
        .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
        .collect();
    let (mut nodes, _) = symmetric_tridiagonal_eigen(&diag, &off);
    let nf = n as f64;
    let mut free = Vec::with_capacity(n);
    for u in nodes.iter_mut() {
        if !(u.is_finite() && *u > 0.0) {
            return Err(DunklError::Quadrature(format!(
                "Laguerre eigenproblem produced node {u}"
            )));
        }
        // Newton on l_n using u l_n' = n l_n - sqrt(n(n+alpha)) l_{n-1}
        for _ in 0..3 {
            let l = laguerre_functions(alpha, n, *u);
            let deriv = nf * l[n] - (nf * (nf + alpha)).sqrt() * l[n - 1];
            if deriv == 0.0 {
                break;
            }
            let step = l[n] * *u / deriv;
            if !step.is_finite() {
                break;
            }
            *u -= step;
            if step.abs() <= 1e-16 * u.abs() {
                break;
            }
        }
        let l = laguerre_functions(alpha, n - 1, *u);
        let s: f64 = l.iter().map(|v| v * v).sum();
        free.push(1.0 / s);
    }
    Ok((nodes, free))
}

/// Rule for `|x|^{2 kappa} e^{-x^2}` from Gauss-Laguerre with `alpha = kappa - 1/2`.
pub fn build_rule(kappa: f64, n: usize) -> Result<QuadratureRule1D> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(DunklError::InvalidMultiplicity(kappa));
    }
    if n == 0 {
        return Err(DunklError::QuadratureOrder { required: 1, got: 0 });
    }
    let (u, free_u) = gauss_laguerre_free(kappa - 0.5, n)?;
    let mut nodes = Vec::with_capacity(2 * n);
    let mut free = Vec::with_capacity(2 * n);
    for i in (0..n).rev() {
        nodes.push(-u[i].sqrt());
        free.push(0.5 * free_u[i]);
    }
    for i in 0..n {
        nodes.push(u[i].sqrt());
        free.push(0.5 * free_u[i]);
    }
    let weights = nodes
        .iter()
        .zip(&free)
        .map(|(x, w)| w * (-x * x).exp())
        .collect();
    Ok(QuadratureRule1D {
        kappa,
        order: n,
        nodes,
        weights,
        free_weights: free,
    })
}

/// `int x^m |x|^{2 kappa} e^{-x^2} dx = Gamma(kappa + (m+1)/2)` for even m, 0 for odd.
pub fn gaussian_moment(kappa: f64, m: usize) -> f64 {
    if m % 2 == 1 {
        return 0.0;
    }
    // upward recurrence from Gamma(kappa + 1/2) keeps full relative precision
    let mut v = statrs::function::gamma::gamma(kappa + 0.5);
    for j in (0..m).step_by(2) {
        v *= kappa + (j as f64 + 1.0) / 2.0;
    }
    v
}

/// Tensor product of 1-D rules. Flat index runs with the last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    rules: Vec<QuadratureRule1D>,
    scale: f64,
    d_eff: f64,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    free_weights: Vec<f64>,
}

impl TensorGrid {
    /// Rules of order `n` in every coordinate of `s`.
    pub fn new(s: &DunklStructure, n: usize) -> Result<Self> {
        let rules = s
            .kappa()
            .iter()
            .map(|&k| build_rule(k, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rules(rules))
    }

    pub fn from_rules(rules: Vec<QuadratureRule1D>) -> Self {
        let d_eff = rules.iter().map(|r| 1.0 + 2.0 * r.kappa()).sum();
        let mut grid = Self {
            rules,
            scale: 1.0,
            d_eff,
            points: Vec::new(),
            weights: Vec::new(),
            free_weights: Vec::new(),
        };
        grid.fill(1.0);
        grid
    }

    fn fill(&mut self, scale: f64) {
        let total: usize = self.rules.iter().map(|r| r.len()).product();
        let jac = scale.powf(self.d_eff);
        self.points = Vec::with_capacity(total);
        self.free_weights = Vec::with_capacity(total);
        for k in 0..total {
            let idx = self.multi_index(k);
            let mut p = Vec::with_capacity(idx.len());
            let mut w = jac;
            for (r, &i) in self.rules.iter().zip(&idx) {
                p.push(scale * r.nodes()[i]);
                w *= r.free_weights()[i];
            }
            self.points.push(p);
            self.free_weights.push(w);
        }
        self.weights = self
            .points
            .iter()
            .zip(&self.free_weights)
            .map(|(p, w)| w * (-p.iter().map(|x| x * x).sum::<f64>()).exp())
            .collect();
        self.scale = scale;
    }

    /// Grid for `int G(X) h^2(X) dX` at nodes `X = scale * x`.
    pub fn scaled(&self, scale: f64) -> Self {
        let mut g = Self {
            rules: self.rules.clone(),
            scale,
            d_eff: self.d_eff,
            points: Vec::new(),
            weights: Vec::new(),
            free_weights: Vec::new(),
        };
        g.fill(scale);
        g
    }

    pub fn rules(&self) -> &[QuadratureRule1D] {
        &self.rules
    }

    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Weights with `h^2 e^{-|x|^2}` absorbed (unscaled grid).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights integrating `G h^2 dx` directly.
    pub fn free_weights(&self) -> &[f64] {
        &self.free_weights
    }

    /// Per-coordinate node indices of flat index `k`.
    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rules.len()];
        for (j, r) in self.rules.iter().enumerate().rev() {
            idx[j] = k % r.len();
            k /= r.len();
        }
        idx
    }

    /// `int G h^2 dx` from samples of `G` at the nodes.
    pub fn integrate_free(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .zip(&self.free_weights)
            .map(|(s, w)| s * w)
            .sum()
    }
}

fn check_samples(expected: usize, samples: &[f64]) -> Result<()> {
    if samples.len() != expected {
        return Err(DunklError::Shape(format!(
            "{} samples for {} nodes",
            samples.len(),
            expected
        )));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(DunklError::NonFinite(i));
    }
    Ok(())
}

/// `(int |f|^p h^2 dx)^{1/p}` from samples of `f` (no Gaussian applied);
/// `p = inf` gives the node maximum.
pub fn weighted_lp_norm(grid: &TensorGrid, samples: &[f64], p: f64) -> Result<f64> {
    check_samples(grid.len(), samples)?;
    if !(p >= 1.0) {
        return Err(DunklError::InvalidExponent(format!("p = {p}")));
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let s: f64 = samples
        .iter()
        .zip(grid.free_weights())
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    Ok(s.powf(1.0 / p))
}

/// Nodes and weights for integration in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeRule {
    /// Trapezoid rule for a periodic integrand on `[a, b)`.
    pub fn periodic(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        Self {
            nodes: (0..n).map(|i| a + h * i as f64).collect(),
            weights: vec![h; n],
        }
    }

    /// Gauss-Legendre rule on `[a, b]`.
    pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Self {
        let (x, w) = gauss_jacobi(n, 0.0, 0.0);
        let half = 0.5 * (b - a);
        Self {
            nodes: x.iter().map(|t| a + half * (t + 1.0)).collect(),
            weights: w.iter().map(|v| v * half).collect(),
        }
    }

    /// `n` Gauss-Legendre nodes on each of `panels` equal panels of `[a, b]`.
    pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, n: usize) -> Self {
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * n);
        let mut weights = Vec::with_capacity(panels * n);
        for k in 0..panels {
            let r = Self::gauss_legendre(a + h * k as f64, a + h * (k + 1) as f64, n);
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Rule for `int_{-L}^{L} g(x) |x|^{2 kappa} dx` from `panels` equal panels
/// per side with `nodes` points each; the panels at the origin carry the
/// power weight through Gauss-Jacobi.
pub fn symmetric_power_rule(kappa: f64, cutoff: f64, panels: usize, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let h = cutoff / panels as f64;
    let mut half: Vec<(f64, f64)> = Vec::with_capacity(panels * nodes);
    let (gj, wj) = gauss_jacobi(nodes, 0.0, 2.0 * kappa);
    let scale = (0.5 * h).powf(2.0 * kappa + 1.0);
    half.extend(gj.iter().zip(&wj).map(|(g, w)| (0.5 * h * (1.0 + g), w * scale)));
    for p in 1..panels {
        let rule = TimeRule::gauss_legendre(p as f64 * h, (p + 1) as f64 * h, nodes);
        half.extend(
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&v, &w)| (v, w * v.powf(2.0 * kappa))),
        );
    }
    half.iter()
        .rev()
        .map(|&(v, w)| (-v, w))
        .chain(half.iter().copied())
        .unzip()
}

/// Gauss-Jacobi rule on `[-1, 1]` for the weight `(1-x)^a (1+x)^b`, `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let kf = k as f64;
                (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            let beta = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    let (x, v) = symmetric_tridiagonal_eigen(&diag, &off);
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let w = (0..n).map(|i| mu0 * v[(0, i)] * v[(0, i)]).collect();
    (x, w)
}

/// `|| ||F(t, .)||_{L^q_kappa} ||_{L^p_t}` for samples `F[i][k] = F(t_i, x_k)`.
pub fn mixed_norm(time: &TimeRule, grid: &TensorGrid, samples: &[Vec<f64>], p: f64, q: f64) -> Result<f64> {
    if samples.len() != time.len() {
        return Err(DunklError::Shape(format!(
            "{} time slices for {} time nodes",
            samples.len(),
            time.len()
        )));
    }
    if !(p >= 1.0) {
        return Err(DunklError::InvalidExponent(format!("p = {p}")));
    }
    let inner = samples
        .iter()
        .map(|row| weighted_lp_norm(grid, row, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(lp_over_time(time, &inner, p))
}

/// `L^p_t` norm of per-node values.
pub fn lp_over_time(time: &TimeRule, values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values
            .iter()
            .zip(&time.weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_moment() {
        let r = build_rule(0.0, 10).unwrap();
        let m2 = r.integrate(|x| x * x);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn half_kappa_mass() {
        let r = build_rule(0.5, 7).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn odd_moments_vanish() {
        for &k in &[0.0, 0.3, 1.5] {
            let r = build_rule(k, 9).unwrap();
            for m in [1, 3, 7, 21] {
                assert_eq!(r.integrate(|x| x.powi(m)), 0.0);
            }
        }
    }

    #[test]
    fn exact_through_degree() {
        for &k in &[0.0, 0.5, 1.0, 2.75] {
            let n = 12;
            let r = build_rule(k, n).unwrap();
            for m in (0..=4 * n - 2).step_by(2) {
                let exact = gaussian_moment(k, m);
                let got = r.integrate(|x| x.powi(m as i32));
                assert!((got - exact).abs() < 1e-13 * exact, "k={k} m={m} {got} {exact}");
            }
        }
    }

    #[test]
    fn power_rule_moments() {
        for kappa in [0.0, 0.5, 1.5] {
            let (x, w) = symmetric_power_rule(kappa, 3.0, 4, 10);
            for m in [0usize, 2, 6] {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(m as i32)).sum();
                let exact = 2.0 * 3f64.powf(m as f64 + 2.0 * kappa + 1.0) / (m as f64 + 2.0 * kappa + 1.0);
                assert!((got - exact).abs() < 1e-12 * exact);
            }
        }
    }

    #[test]
    fn legendre_and_jacobi() {
        let r = TimeRule::gauss_legendre(0.0, 2.0, 8);
        assert!((r.integrate(|t| t.powi(15)) - 2f64.powi(16) / 16.0).abs() < 1e-10);
        // int_{-1}^{1} (1-x)^{1/2} (1+x)^{-1/2} dx = pi
        let (_, w) = gauss_jacobi(6, 0.5, -0.5);
        assert!((w.iter().sum::<f64>() - PI).abs() < 1e-13);
        // int (1-x)^a (1+x)^{b} (1+x)^3 dx = 2^{a+b+4} B(a+1, b+4)
        let (a, b) = (1.5, 0.25);
        let (x, w) = gauss_jacobi(5, a, b);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 + x).powi(3)).sum();
        let beta = (ln_gamma(a + 1.0) + ln_gamma(b + 4.0) - ln_gamma(a + b + 5.0)).exp();
        let exact = 2f64.powf(a + b + 4.0) * beta;
        assert!((s - exact).abs() < 1e-13 * exact, "{s} {exact}");
    }

    #[test]
    fn trapezoid_constant() {
        let t = TimeRule::periodic(-PI, PI, 64);
        assert!((t.integrate(|_| 1.0) - 2.0 * PI).abs() < 1e-13);
    }
}
