//! Generalized Hermite basis, Mehler kernel, the oscillator propagator and
//! the transforms built on it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dunkl::DunklStructure;
use crate::error::{DunklError, Result};
use crate::quadrature::{TensorGrid, TimeRule};
use crate::special::laguerre_functions;

/// `phi_0..=phi_n_max` at `x` for multiplicity `kappa`, orthonormal in
/// `L^2(|x|^{2 kappa} dx)` with positive leading coefficient.
pub fn hermite_functions_1d(kappa: f64, n_max: usize, x: f64) -> Vec<f64> {
    let u = x * x;
    let m_even = n_max / 2;
    let even = laguerre_functions(kappa - 0.5, m_even, u);
    let odd = if n_max >= 1 {
        laguerre_functions(kappa + 0.5, (n_max - 1) / 2, u)
    } else {
        Vec::new()
    };
    (0..=n_max)
        .map(|n| {
            let m = n / 2;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            if n % 2 == 0 {
                sign * even[m]
            } else {
                sign * x * odd[m]
            }
        })
        .collect()
}

/// `T phi_n` at `x` for `n = 0..=n_max`, where `T f = f' + kappa (f(x) - f(-x)) / x`.
pub fn dunkl_derivative_1d(kappa: f64, n_max: usize, x: f64) -> Vec<f64> {
    let u = x * x;
    let a = laguerre_functions(kappa - 0.5, n_max / 2, u);
    let b = laguerre_functions(kappa + 0.5, n_max / 2, u);
    let c = laguerre_functions(kappa + 1.5, n_max / 2, u);
    (0..=n_max)
        .map(|n| {
            let m = n / 2;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let sm = (m as f64).sqrt();
            if n % 2 == 0 {
                let lower = if m > 0 { b[m - 1] } else { 0.0 };
                sign * x * (-2.0 * sm * lower - a[m])
            } else {
                let lower = if m > 0 { c[m - 1] } else { 0.0 };
                sign * (b[m] * (1.0 - u + 2.0 * kappa) - 2.0 * u * sm * lower)
            }
        })
        .collect()
}

#[derive(Debug)]
struct BasisInner {
    structure: DunklStructure,
    degree: usize,
    multi_indices: Vec<Vec<usize>>,
    grid: TensorGrid,
    tables_1d: Vec<DMatrix<f64>>,
    table: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

/// Truncated orthonormal eigenbasis of `H_kappa` with box truncation
/// `mu_j <= N`, together with its evaluation tables on a tensor grid.
///
/// Cloning is cheap; clones share storage.
#[derive(Debug, Clone)]
pub struct HermiteBasis(Arc<BasisInner>);

impl PartialEq for HermiteBasis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.structure == other.0.structure
                && self.0.degree == other.0.degree
                && self.0.grid == other.0.grid)
    }
}

impl HermiteBasis {
    /// Basis of degree `n` on `grid`; the grid order must be at least `n + 1`
    /// in every coordinate so that products of two basis functions and a
    /// quadratic are integrated exactly.
    pub fn new(s: &DunklStructure, n: usize, grid: TensorGrid) -> Result<Self> {
        if grid.dim() != s.d() {
            return Err(DunklError::DimensionMismatch {
                expected: s.d(),
                got: grid.dim(),
            });
        }
        for (rule, &k) in grid.rules().iter().zip(s.kappa()) {
            if rule.order() < n + 1 {
                return Err(DunklError::QuadratureOrder {
                    required: n + 1,
                    got: rule.order(),
                });
            }
            if rule.kappa() != k {
                return Err(DunklError::Quadrature(format!(
                    "grid built for multiplicity {} but structure has {}",
                    rule.kappa(),
                    k
                )));
            }
        }
        let d = s.d();
        let multi_indices = box_indices(d, n);
        let tables_1d: Vec<DMatrix<f64>> = grid
            .rules()
            .iter()
            .zip(s.kappa())
            .map(|(rule, &k)| {
                let rows: Vec<Vec<f64>> = rule
                    .nodes()
                    .iter()
                    .map(|&x| hermite_functions_1d(k, n, x))
                    .collect();
                DMatrix::from_fn(rule.len(), n + 1, |i, m| rows[i][m])
            })
            .collect();
        let table = DMatrix::from_fn(grid.len(), multi_indices.len(), |k, col| {
            let idx = grid.multi_index(k);
            multi_indices[col]
                .iter()
                .enumerate()
                .map(|(j, &m)| tables_1d[j][(idx[j], m)])
                .product()
        });
        let d_eff = s.d_eff();
        let eigenvalues = multi_indices
            .iter()
            .map(|mu| 2.0 * mu.iter().sum::<usize>() as f64 + d_eff)
            .collect();
        Ok(Self(Arc::new(BasisInner {
            structure: s.clone(),
            degree: n,
            multi_indices,
            grid,
            tables_1d,
            table,
            eigenvalues,
        })))
    }

    /// Basis of degree `n` on a grid of order `oversample * (n + 1)`.
    pub fn with_oversampling(s: &DunklStructure, n: usize, oversample: usize) -> Result<Self> {
        let grid = TensorGrid::new(s, oversample.max(1) * (n + 1))?;
        Self::new(s, n, grid)
    }

    pub fn structure(&self) -> &DunklStructure {
        &self.0.structure
    }

    /// Per-coordinate truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn len(&self) -> usize {
        self.0.multi_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.multi_indices.is_empty()
    }

    pub fn multi_indices(&self) -> &[Vec<usize>] {
        &self.0.multi_indices
    }

    pub fn index_of(&self, mu: &[usize]) -> Option<usize> {
        self.0.multi_indices.iter().position(|m| m == mu)
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.0.grid
    }

    /// `phi_m(x_i)` along coordinate `j`.
    pub fn table_1d(&self, j: usize) -> &DMatrix<f64> {
        &self.0.tables_1d[j]
    }

    /// `phi_mu(x_k)` with grid points as rows.
    pub fn table(&self) -> &DMatrix<f64> {
        &self.0.table
    }

    /// `2|mu| + d + 2 gamma_kappa`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.0.eigenvalues
    }

    /// Indices with `mu_j <= N - margin` in every coordinate.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        let lim = self.degree().saturating_sub(margin);
        (0..self.len())
            .filter(|&i| self.0.multi_indices[i].iter().all(|&m| m <= lim))
            .collect()
    }

    /// All `phi_mu` at an arbitrary point.
    pub fn eval_point(&self, x: &[f64]) -> Vec<f64> {
        let per_dim: Vec<Vec<f64>> = self
            .structure()
            .kappa()
            .iter()
            .zip(x)
            .map(|(&k, &xj)| hermite_functions_1d(k, self.degree(), xj))
            .collect();
        self.0
            .multi_indices
            .iter()
            .map(|mu| mu.iter().enumerate().map(|(j, &m)| per_dim[j][m]).product())
            .collect()
    }

    /// `M[mu, c] = int phi_mu(x) A_c(x) h^2 dx` for a table `A` sampled on the grid.
    pub fn project_table(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let w = self.grid().free_weights();
        let mut weighted = self.table().clone();
        for (k, mut row) in weighted.row_iter_mut().enumerate() {
            row *= w[k];
        }
        weighted.transpose() * a
    }

    /// Matrix of multiplication by a function sampled on the grid.
    pub fn multiplication_matrix(&self, samples: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.table().clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= samples[k];
        }
        self.project_table(&scaled)
    }

    /// Matrix of multiplication by `f`, integrated on the basis grid dilated
    /// by `scale`. A Gaussian factor `e^{-a|x|^2}` in `f` is integrated
    /// exactly when `scale = (1 + a)^{-1/2}`.
    pub fn multiplication_matrix_scaled(&self, f: impl Fn(&[f64]) -> f64, scale: f64) -> DMatrix<f64> {
        if scale == 1.0 {
            let samples: Vec<f64> = self.grid().points().iter().map(|x| f(x)).collect();
            return self.multiplication_matrix(&samples);
        }
        let grid = self.grid().scaled(scale);
        let n = self.len();
        let mut table = DMatrix::zeros(grid.len(), n);
        let mut weighted = DMatrix::zeros(grid.len(), n);
        for (k, x) in grid.points().iter().enumerate() {
            let w = grid.free_weights()[k] * f(x);
            for (j, v) in self.eval_point(x).into_iter().enumerate() {
                table[(k, j)] = v;
                weighted[(k, j)] = v * w;
            }
        }
        weighted.transpose() * table
    }

    /// `<phi_mu, phi_nu>` by quadrature.
    pub fn gram(&self) -> DMatrix<f64> {
        self.project_table(self.table())
    }
}

fn box_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    let total = (n + 1).pow(d as u32);
    (0..total)
        .map(|mut k| {
            let mut mu = vec![0; d];
            for j in (0..d).rev() {
                mu[j] = k % (n + 1);
                k /= n + 1;
            }
            mu
        })
        .collect()
}

/// Element of the truncated `L^2_kappa` space given by its basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: HermiteBasis,
    coeffs: DVector<Complex64>,
}

impl StateVector {
    pub fn new(basis: HermiteBasis, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(DunklError::Shape(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: &HermiteBasis) -> Self {
        Self {
            coeffs: DVector::zeros(basis.len()),
            basis: basis.clone(),
        }
    }

    /// The basis function with flat index `i`.
    pub fn basis_function(basis: &HermiteBasis, i: usize) -> Self {
        let mut v = Self::zero(basis);
        v.coeffs[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// `<self, other>`, antilinear in `other`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        other.coeffs.dotc(&self.coeffs)
    }

    pub fn conj(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.map(|c| c.conj()),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.basis
            .eval_point(x)
            .iter()
            .zip(self.coeffs.iter())
            .map(|(p, c)| c * p)
            .sum()
    }

    /// Values at the basis grid nodes.
    pub fn evaluate_grid(&self) -> Vec<Complex64> {
        let t = self.basis.table();
        (0..t.nrows())
            .map(|k| {
                t.row(k)
                    .iter()
                    .zip(self.coeffs.iter())
                    .map(|(p, c)| c * p)
                    .sum()
            })
            .collect()
    }

    /// `e^{-itH} v`.
    pub fn propagate(&self, t: f64) -> Self {
        propagate_hermite(self, t)
    }
}

/// `c_mu -> e^{-i t lambda_mu} c_mu`.
pub fn propagate_hermite(v: &StateVector, t: f64) -> StateVector {
    let coeffs = DVector::from_iterator(
        v.coeffs.len(),
        v.coeffs
            .iter()
            .zip(v.basis.eigenvalues())
            .map(|(c, &l)| c * Complex64::from_polar(1.0, -t * l)),
    );
    StateVector {
        basis: v.basis.clone(),
        coeffs,
    }
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Generating function `sum_mu phi_mu(x) phi_mu(y) w^{|mu|}` in closed form.
pub fn mehler_closed_form(s: &DunklStructure, w: Complex64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    s.check_point(x)?;
    s.check_point(y)?;
    let one_minus = Complex64::new(1.0, 0.0) - w * w;
    if one_minus.norm() < 1e-14 {
        return Err(DunklError::SingularMehlerParameter { re: w.re, im: w.im });
    }
    let half = s.half_d_eff();
    let (e, log_scale) = s.kernel_scaled(2.0 * w / one_minus, x, y);
    let log = half * std::f64::consts::LN_2 + s.m_kappa().ln() - half * one_minus.ln()
        - 0.5 * (2.0 - one_minus) / one_minus * (sq_norm(x) + sq_norm(y))
        + log_scale;
    Ok(log.exp() * e)
}

/// Distance from `t` to the singular set `(pi/2) Z`.
pub fn singular_distance(t: f64) -> f64 {
    let r = t.rem_euclid(FRAC_PI_2);
    r.min(FRAC_PI_2 - r)
}

/// Kernel of `e^{-itH}`:
/// `M (i sin 2t)^{-s} e^{(i/2) cot 2t (|x|^2+|y|^2)} E(x / (i sin 2t), y)`,
/// principal branch, so `arg(i sin 2t) = +-pi/2` with the sign of `sin 2t`.
pub fn kernel_kit(s: &DunklStructure, t: f64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    s.check_point(x)?;
    s.check_point(y)?;
    let sn = (2.0 * t).sin();
    if sn.abs() < 1e-10 {
        return Err(DunklError::SingularTime {
            t,
            distance: singular_distance(t),
        });
    }
    let half = s.half_d_eff();
    let cot = (2.0 * t).cos() / sn;
    let a = Complex64::new(0.0, -1.0 / sn);
    let (e, log_scale) = s.kernel_scaled(a, x, y);
    let log_i_sin = Complex64::new(sn.abs().ln(), FRAC_PI_2.copysign(sn));
    let log = Complex64::new(s.m_kappa().ln() + log_scale, 0.5 * cot * (sq_norm(x) + sq_norm(y)))
        - half * log_i_sin;
    Ok(log.exp() * e)
}

/// `sum_mu g_mu phi_mu(x) e^{-i t nu_mu}` with `nu_mu = 2|mu| + d + 2 gamma_kappa`:
/// the extension operator restricted to the spectral surface.
pub fn extension_operator(basis: &HermiteBasis, g: &[Complex64], t: f64, x: &[f64]) -> Result<Complex64> {
    if g.len() != basis.len() {
        return Err(DunklError::Shape(format!(
            "{} surface values for a basis of size {}",
            g.len(),
            basis.len()
        )));
    }
    basis.structure().check_point(x)?;
    Ok(basis
        .eval_point(x)
        .iter()
        .zip(g)
        .zip(basis.eigenvalues())
        .map(|((p, gv), &nu)| gv * p * Complex64::from_polar(1.0, -t * nu))
        .sum())
}

/// Distinct eigenvalues `d_eff + 2k` present in the truncation.
pub fn spectral_frequencies(basis: &HermiteBasis) -> Vec<f64> {
    let kmax = basis.structure().d() * basis.degree();
    let d_eff = basis.structure().d_eff();
    (0..=kmax).map(|k| d_eff + 2.0 * k as f64).collect()
}

/// Space-time coefficients `f(mu, nu) = int int F phi_mu e^{i nu t} h^2 dx dt`
/// over `(-pi, pi)`; rows follow the basis, columns follow `nus`.
///
/// `samples[i][k]` is `F(t_i, x_k)` at the time nodes of `time` and the basis grid.
pub fn fdh_transform(
    basis: &HermiteBasis,
    time: &TimeRule,
    samples: &[Vec<Complex64>],
    nus: &[f64],
) -> Result<DMatrix<Complex64>> {
    if samples.len() != time.len() {
        return Err(DunklError::Shape(format!(
            "{} time slices for {} time nodes",
            samples.len(),
            time.len()
        )));
    }
    let npts = basis.grid().len();
    let w = basis.grid().free_weights();
    let table = basis.table();
    let mut out = DMatrix::<Complex64>::zeros(basis.len(), nus.len());
    for ((row, &t), &tw) in samples.iter().zip(&time.nodes).zip(&time.weights) {
        if row.len() != npts {
            return Err(DunklError::Shape(format!(
                "{} spatial samples for {} nodes",
                row.len(),
                npts
            )));
        }
        // spatial projection of this time slice
        let proj: Vec<Complex64> = (0..basis.len())
            .map(|mu| (0..npts).map(|k| row[k] * (w[k] * table[(k, mu)])).sum())
            .collect();
        for (c, &nu) in nus.iter().enumerate() {
            let ph = Complex64::from_polar(tw, nu * t);
            for (mu, p) in proj.iter().enumerate() {
                out[(mu, c)] += p * ph;
            }
        }
    }
    Ok(out)
}

/// Length of the time window `(-pi, pi)` used by [`fdh_transform`].
pub const TORUS_LENGTH: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_value() {
        for &k in &[0.0, 0.5, 1.3] {
            let v = hermite_functions_1d(k, 0, 0.8)[0];
            let want = (-0.32f64).exp() / statrs::function::gamma::gamma(k + 0.5).sqrt();
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn classical_case_matches_recurrence() {
        let x: f64 = 0.7;
        let mut h = vec![PI.powf(-0.25) * (-x * x / 2.0).exp()];
        h.push(2f64.sqrt() * x * h[0]);
        for n in 1..6 {
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
            h.push(next);
        }
        let ours = hermite_functions_1d(0.0, 6, x);
        for n in 0..=6 {
            assert!((ours[n] - h[n]).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (k, x, h) = (1.2, 0.9, 1e-5);
        let t = dunkl_derivative_1d(k, 9, x);
        let p = hermite_functions_1d(k, 9, x + h);
        let m = hermite_functions_1d(k, 9, x - h);
        let c = hermite_functions_1d(k, 9, x);
        let r = hermite_functions_1d(k, 9, -x);
        for n in 0..=9 {
            let fd = (p[n] - m[n]) / (2.0 * h) + k * (c[n] - r[n]) / x;
            assert!((t[n] - fd).abs() < 1e-7, "n={n} {} {}", t[n], fd);
        }
    }

    #[test]
    fn singular_time_rejected() {
        let s = DunklStructure::new(vec![1.0]).unwrap();
        let e = kernel_kit(&s, FRAC_PI_2, &[0.1], &[0.2]).unwrap_err();
        assert!(matches!(e, DunklError::SingularTime { .. }));
    }
}
