//! Reflection-group data for Z2^d, the Dunkl weight, normalization
//! constants, the Dunkl kernel and Dunkl operator matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{DunklError, Result};
use crate::hermite::{dunkl_derivative_1d, HermiteBasis};
use crate::operators::OperatorMatrix;
use crate::special::{hyp1f1_series, normalized_bessel_scaled};

/// Largest |z| handled by the power series when [`KernelRoute::Auto`] is used.
pub const SERIES_RADIUS: f64 = 20.0;
/// Largest `|z| - |Re z|` the series route accepts under [`KernelRoute::Auto`];
/// beyond it the terms cancel by more than ~e^5.
pub const SERIES_OSCILLATION_LIMIT: f64 = 2.5;

/// Dimension and per-coordinate multiplicities for the group Z2^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunklStructure {
    d: usize,
    kappa: Vec<f64>,
    gamma_kappa: f64,
    m_kappa: f64,
}

impl DunklStructure {
    pub fn new(kappa: Vec<f64>) -> Result<Self> {
        if kappa.is_empty() {
            return Err(DunklError::EmptyDimension);
        }
        if let Some(&k) = kappa.iter().find(|k| !k.is_finite() || **k < 0.0) {
            return Err(DunklError::InvalidMultiplicity(k));
        }
        let gamma_kappa = kappa.iter().sum();
        let m_kappa = kappa
            .iter()
            .map(|&k| 1.0 / (2f64.powf(k + 0.5) * gamma(k + 0.5)))
            .product();
        Ok(Self {
            d: kappa.len(),
            kappa,
            gamma_kappa,
            m_kappa,
        })
    }

    /// Same multiplicity on every coordinate.
    pub fn uniform(d: usize, kappa: f64) -> Result<Self> {
        Self::new(vec![kappa; d])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn gamma_kappa(&self) -> f64 {
        self.gamma_kappa
    }

    /// `M_kappa = (int e^{-|x|^2/2} h_kappa^2 dx)^{-1}`.
    pub fn m_kappa(&self) -> f64 {
        self.m_kappa
    }

    /// Effective dimension `d + 2 gamma_kappa`.
    pub fn d_eff(&self) -> f64 {
        self.d as f64 + 2.0 * self.gamma_kappa
    }

    /// Kernel homogeneity exponent `d/2 + gamma_kappa`.
    pub fn half_d_eff(&self) -> f64 {
        0.5 * self.d_eff()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(DunklError::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `h_kappa^2(x) = prod_j |x_j|^{2 kappa_j}`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.kappa
            .iter()
            .zip(x)
            .map(|(&k, &xj)| if k == 0.0 { 1.0 } else { xj.abs().powf(2.0 * k) })
            .product()
    }

    /// `E_kappa(a x, y)` as the product of rank-one kernels.
    pub fn kernel(&self, a: Complex64, x: &[f64], y: &[f64]) -> Complex64 {
        let (v, log_scale) = self.kernel_scaled(a, x, y);
        v * log_scale.exp()
    }

    /// `E_kappa(a x, y) = value * exp(log_scale)` with `log_scale = sum_j |Re(a x_j y_j)|`.
    pub fn kernel_scaled(&self, a: Complex64, x: &[f64], y: &[f64]) -> (Complex64, f64) {
        let mut value = Complex64::new(1.0, 0.0);
        let mut log_scale = 0.0;
        for ((&k, &xj), &yj) in self.kappa.iter().zip(x).zip(y) {
            let z = a * xj * yj;
            value *= dunkl_kernel_1d_scaled(k, z, KernelRoute::Auto);
            log_scale += z.re.abs();
        }
        (value, log_scale)
    }
}

/// Which representation of the rank-one kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelRoute {
    /// `e^{z} 1F1(kappa; 2kappa+1; -2z)` (Kummer-transformed for Re z > 0).
    Series,
    /// `j_{kappa-1/2}(iz) + z/(2kappa+1) j_{kappa+1/2}(iz)` with normalized Bessel functions.
    Bessel,
    Auto,
}

/// Rank-one Dunkl kernel `E_kappa(a, y)` for the group Z2.
pub fn dunkl_kernel_1d(kappa: f64, a: Complex64, y: f64) -> Complex64 {
    let z = a * y;
    dunkl_kernel_1d_scaled(kappa, z, KernelRoute::Auto) * z.re.abs().exp()
}

/// `e^{-|Re z|} E_kappa(z)` where `E_kappa(z) := E_kappa(z, 1)`.
pub fn dunkl_kernel_1d_scaled(kappa: f64, z: Complex64, route: KernelRoute) -> Complex64 {
    if kappa == 0.0 {
        return (z - z.re.abs()).exp();
    }
    let route = match route {
        KernelRoute::Auto => {
            if z.norm() <= SERIES_RADIUS && z.norm() - z.re.abs() <= SERIES_OSCILLATION_LIMIT {
                KernelRoute::Series
            } else {
                KernelRoute::Bessel
            }
        }
        r => r,
    };
    match route {
        KernelRoute::Series => kernel_series_scaled(kappa, z),
        _ => kernel_bessel_scaled(kappa, z),
    }
}

fn kernel_series_scaled(kappa: f64, z: Complex64) -> Complex64 {
    let b = 2.0 * kappa + 1.0;
    if z.re >= 0.0 {
        // Kummer: e^z 1F1(k; 2k+1; -2z) = e^{-z} 1F1(k+1; 2k+1; 2z)
        let f = hyp1f1_series(kappa + 1.0, b, 2.0 * z);
        Complex64::new(-2.0 * z.re, -z.im).exp() * f
    } else {
        let f = hyp1f1_series(kappa, b, -2.0 * z);
        Complex64::new(2.0 * z.re, z.im).exp() * f
    }
}

fn kernel_bessel_scaled(kappa: f64, z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        return kernel_series_scaled(kappa, z);
    }
    let even = normalized_bessel_scaled(kappa - 0.5, z);
    let odd = normalized_bessel_scaled(kappa + 0.5, z);
    even + z / (2.0 * kappa + 1.0) * odd
}

/// Matrix of the Dunkl operator `T_j` (0-based coordinate) in the basis,
/// assembled by quadrature of the closed-form action on each basis function.
pub fn dunkl_operator_matrix(basis: &HermiteBasis, j: usize) -> Result<OperatorMatrix> {
    let s = basis.structure();
    if j >= s.d() {
        return Err(DunklError::CoordinateOutOfRange { index: j, d: s.d() });
    }
    let grid = basis.grid();
    let n = basis.degree();
    let kappa_j = s.kappa()[j];
    let rule = &grid.rules()[j];
    // Closed-form T phi_n along coordinate j at every 1-D node.
    let action_1d: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| dunkl_derivative_1d(kappa_j, n, x))
        .collect();
    let dim = basis.len();
    let npts = grid.len();
    let mut action = DMatrix::<f64>::zeros(npts, dim);
    for k in 0..npts {
        let idx = grid.multi_index(k);
        for (col, mu) in basis.multi_indices().iter().enumerate() {
            let mut v = action_1d[idx[j]][mu[j]];
            for (l, &ml) in mu.iter().enumerate() {
                if l != j {
                    v *= basis.table_1d(l)[(idx[l], ml)];
                }
            }
            action[(k, col)] = v;
        }
    }
    let m = basis.project_table(&action);
    Ok(OperatorMatrix::from_real(basis.clone(), &m))
}

/// Matrix of multiplication by `x_j`.
pub fn position_matrix(basis: &HermiteBasis, j: usize) -> Result<OperatorMatrix> {
    let s = basis.structure();
    if j >= s.d() {
        return Err(DunklError::CoordinateOutOfRange { index: j, d: s.d() });
    }
    let samples: Vec<f64> = (0..basis.grid().len())
        .map(|k| basis.grid().point(k)[j])
        .collect();
    Ok(OperatorMatrix::from_real(
        basis.clone(),
        &basis.multiplication_matrix(&samples),
    ))
}

/// `H_kappa = -sum_j T_j^2 + |x|^2` assembled from the operator matrices.
///
/// Entries touching the truncation edge (any `mu_j = N`) are not exact.
pub fn hermite_operator_matrix(basis: &HermiteBasis) -> Result<OperatorMatrix> {
    let dim = basis.len();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..basis.structure().d() {
        let t = dunkl_operator_matrix(basis, j)?;
        let x = position_matrix(basis, j)?;
        h -= t.matrix() * t.matrix();
        h += x.matrix() * x.matrix();
    }
    Ok(OperatorMatrix::new(basis.clone(), h))
}
