//! Operators in the truncated spectral basis: Schatten norms, densities,
//! the dual Strichartz functional, mixed position-momentum operators and
//! the trace bound for their products.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dunkl::DunklStructure;
use crate::error::{DunklError, Result};
use crate::hermite::{HermiteBasis, StateVector};
use crate::quadrature::{symmetric_power_rule, TensorGrid, TimeRule};

/// Matrix `A[mu, nu] = <A phi_nu, phi_mu>` of an operator in the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: HermiteBasis,
    m: DMatrix<Complex64>,
}

impl OperatorMatrix {
    /// Panics if `m` is not square of the basis size.
    pub fn new(basis: HermiteBasis, m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.shape(), (basis.len(), basis.len()), "operator shape");
        Self { basis, m }
    }

    pub fn from_real(basis: HermiteBasis, m: &DMatrix<f64>) -> Self {
        Self::new(basis, m.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn zeros(basis: &HermiteBasis) -> Self {
        Self::new(basis.clone(), DMatrix::zeros(basis.len(), basis.len()))
    }

    pub fn identity(basis: &HermiteBasis) -> Self {
        Self::new(basis.clone(), DMatrix::identity(basis.len(), basis.len()))
    }

    /// `|f><g|`.
    pub fn rank_one(f: &StateVector, g: &StateVector) -> Self {
        Self::new(f.basis().clone(), f.coeffs() * g.coeffs().adjoint())
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(basis: &HermiteBasis, d: &[Complex64]) -> Self {
        Self::new(
            basis.clone(),
            DMatrix::from_diagonal(&DVector::from_column_slice(d)),
        )
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.basis.clone(), self.m.adjoint())
    }

    /// `max |A - A*|` entrywise.
    pub fn self_adjoint_defect(&self) -> f64 {
        let a = &self.m;
        let mut worst = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..=i {
                worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_defect() < 1e-12
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn compose(&self, other: &OperatorMatrix) -> Self {
        Self::new(self.basis.clone(), &self.m * &other.m)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.basis.clone(), &self.m * c)
    }

    pub fn add(&self, other: &OperatorMatrix) -> Self {
        Self::new(self.basis.clone(), &self.m + &other.m)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector::new(self.basis.clone(), &self.m * v.coeffs()).expect("same basis")
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.m.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_norm(self, p)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// `e^{-itH} A e^{itH}`.
    pub fn conjugate_hermite(&self, t: f64) -> Self {
        let l = self.basis.eigenvalues();
        let m = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.m[(i, j)] * Complex64::from_polar(1.0, -t * (l[i] - l[j]))
        });
        Self::new(self.basis.clone(), m)
    }

    /// `|A| = (A* A)^{1/2}` for self-adjoint `A` via its eigendecomposition.
    pub fn abs_self_adjoint(&self) -> Result<Self> {
        let defect = self.self_adjoint_defect();
        if defect > 1e-10 {
            return Err(DunklError::NotSelfAdjoint(defect));
        }
        let h = (&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let v = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x.abs(), 0.0)));
        Ok(Self::new(self.basis.clone(), v * d * v.adjoint()))
    }

    /// `Tr(A V)` for multiplication by samples `v` on the basis grid.
    pub fn trace_against(&self, v: &[f64]) -> Complex64 {
        let mv = self.basis.multiplication_matrix(v);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.m[(i, j)] * mv[(j, i)];
            }
        }
        acc
    }
}

/// `(sum sigma_j^p)^{1/p}` over singular values; `p = inf` is the largest one.
pub fn schatten_norm(a: &OperatorMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(DunklError::InvalidExponent(format!("Schatten p = {p}")));
    }
    let s = a.singular_values();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(DunklError::Unsupported("SVD produced non-finite values".into()));
    }
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = s.iter().map(|v| (v / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Orthonormal functions `f_j` with real weights `n_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalSystem {
    basis: HermiteBasis,
    /// Coefficient vectors as columns.
    vectors: DMatrix<Complex64>,
    coeffs: Vec<f64>,
}

impl OrthonormalSystem {
    /// Columns of `vectors` must be orthonormal to `1e-10`.
    pub fn new(basis: HermiteBasis, vectors: DMatrix<Complex64>, coeffs: Vec<f64>) -> Result<Self> {
        if vectors.nrows() != basis.len() || vectors.ncols() != coeffs.len() {
            return Err(DunklError::Shape(format!(
                "{}x{} vectors, {} weights, basis {}",
                vectors.nrows(),
                vectors.ncols(),
                coeffs.len(),
                basis.len()
            )));
        }
        let sys = Self {
            basis,
            vectors,
            coeffs,
        };
        let defect = sys.gram_defect();
        if defect > 1e-10 {
            return Err(DunklError::Shape(format!(
                "system is not orthonormal (Gram defect {defect:e})"
            )));
        }
        Ok(sys)
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn function(&self, j: usize) -> StateVector {
        StateVector::new(self.basis.clone(), self.vectors.column(j).into_owned()).expect("shape")
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(self.basis.clone(), self.vectors.clone(), coeffs)
    }

    /// First `j` functions and weights.
    pub fn prefix(&self, j: usize) -> Result<Self> {
        if j > self.len() {
            return Err(DunklError::SystemTooLarge {
                requested: j,
                available: self.len(),
            });
        }
        Self::new(
            self.basis.clone(),
            self.vectors.columns(0, j).into_owned(),
            self.coeffs[..j].to_vec(),
        )
    }

    /// `max |G - I|` for the Gram matrix.
    pub fn gram_defect(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// `gamma = sum_j n_j |f_j><f_j|`.
    pub fn operator(&self) -> OperatorMatrix {
        let n = DMatrix::from_diagonal(&DVector::from_iterator(
            self.len(),
            self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)),
        ));
        OperatorMatrix::new(
            self.basis.clone(),
            &self.vectors * n * self.vectors.adjoint(),
        )
    }
}

/// `rho(x_k) = Re sum A[mu,nu] phi_mu(x_k) phi_nu(x_k)` on the basis grid.
pub fn density(gamma: &OperatorMatrix) -> Vec<f64> {
    let t = gamma.basis().table();
    let tc = t.map(|v| Complex64::new(v, 0.0));
    let b = &tc * gamma.matrix();
    (0..t.nrows())
        .map(|k| {
            b.row(k)
                .iter()
                .zip(t.row(k).iter())
                .map(|(c, &p)| c.re * p)
                .sum()
        })
        .collect()
}

/// Generator of the flow conjugating the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagator {
    /// `H_kappa = -Delta_kappa + |x|^2`.
    Hermite,
    /// `-Delta_kappa`.
    Laplacian,
}

impl fmt::Display for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Propagator::Hermite => write!(f, "hermite"),
            Propagator::Laplacian => write!(f, "laplacian"),
        }
    }
}

impl std::str::FromStr for Propagator {
    type Err = DunklError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermite" | "h" => Ok(Propagator::Hermite),
            "laplacian" | "laplace" | "delta" => Ok(Propagator::Laplacian),
            other => Err(DunklError::Config(format!("unknown propagator {other:?}"))),
        }
    }
}

/// Density samples together with the grid they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    pub grid: TensorGrid,
    pub values: Vec<f64>,
}

/// Density of `gamma(t) = e^{-itP} gamma e^{itP}`. For the Laplacian the
/// samples sit on the basis grid dilated by the lens scale `sqrt(1+4t^2)`.
pub fn evolved_density(gamma: &OperatorMatrix, t: f64, p: Propagator) -> SampledDensity {
    match p {
        Propagator::Hermite => SampledDensity {
            grid: gamma.basis().grid().clone(),
            values: density(&gamma.conjugate_hermite(t)),
        },
        Propagator::Laplacian => {
            // e^{it Delta} phi_mu (s x) = A^{-1} e^{i v|x|^2/2} e^{-i th lambda_mu} phi_mu(x)
            // with v = 2t, s = sqrt(1+v^2), th = arctan(v)/2, A = s^{d_eff/2}; the chirp
            // cancels in the density.
            let v = 2.0 * t;
            let scale = (1.0 + v * v).sqrt();
            let th = 0.5 * v.atan();
            let d_eff = gamma.basis().structure().d_eff();
            let a2 = scale.powf(d_eff);
            let rho = density(&gamma.conjugate_hermite(th));
            SampledDensity {
                grid: gamma.basis().grid().scaled(scale),
                values: rho.into_iter().map(|r| r / a2).collect(),
            }
        }
    }
}

/// Matrix of `e^{-it Delta} M_f e^{it Delta}` in the basis, exact through the
/// lens relation: entries are `e^{i th (lambda_mu - lambda_nu)} int f(s x) phi_mu phi_nu h^2`
/// with `s = sqrt(1+4t^2)`, `th = arctan(2t)/2`. Requires real `f`.
pub fn free_conjugated_multiplication(
    basis: &HermiteBasis,
    t: f64,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> DMatrix<Complex64> {
    let scale = (1.0 + 4.0 * t * t).sqrt();
    let th = 0.5 * (2.0 * t).atan();
    let samples: Vec<f64> = basis
        .grid()
        .points()
        .iter()
        .map(|x| {
            let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
            f(&xs)
        })
        .collect();
    let m = basis.multiplication_matrix(&samples);
    let l = basis.eigenvalues();
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        Complex64::from_polar(m[(i, j)], th * (l[i] - l[j]))
    })
}

/// `B = int e^{itP} V(t) e^{-itP} dt` and its Schatten norm.
#[derive(Debug, Clone)]
pub struct DualFunctional {
    pub operator: OperatorMatrix,
    /// Schatten-`2 q'` norm of `B`.
    pub value: f64,
    /// `int ||V(t)||_{L^inf} dt` over the grid nodes.
    pub l1_linf: f64,
}

/// Dual form of the orthonormal Strichartz inequality: the Schatten-`2q'`
/// norm of `int e^{itP} V(t, .) e^{-itP} dt` over the nodes of `time`.
pub fn dual_functional(
    basis: &HermiteBasis,
    v: &(dyn Fn(f64, &[f64]) -> f64 + Sync),
    p: Propagator,
    time: &TimeRule,
    qprime: f64,
) -> Result<DualFunctional> {
    if !(qprime >= 1.0) {
        return Err(DunklError::InvalidExponent(format!("q' = {qprime}")));
    }
    let n = basis.len();
    let l = basis.eigenvalues();
    let slices: Vec<(DMatrix<Complex64>, f64)> = time
        .nodes
        .par_iter()
        .zip(time.weights.par_iter())
        .map(|(&t, &w)| -> Result<(DMatrix<Complex64>, f64)> {
            let vt = |x: &[f64]| v(t, x);
            let mut sup = 0.0f64;
            let m = match p {
                Propagator::Hermite => {
                    let samples: Vec<f64> = basis.grid().points().iter().map(|x| vt(x)).collect();
                    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
                        return Err(DunklError::NonFinite(i));
                    }
                    sup = samples.iter().fold(0.0, |m, s| m.max(s.abs()));
                    let mv = basis.multiplication_matrix(&samples);
                    DMatrix::from_fn(n, n, |i, j| Complex64::from_polar(mv[(i, j)], t * (l[i] - l[j])))
                }
                Propagator::Laplacian => {
                    // e^{-it Delta} V e^{it Delta}
                    let scale = (1.0 + 4.0 * t * t).sqrt();
                    for x in basis.grid().points() {
                        let xs: Vec<f64> = x.iter().map(|c| c * scale).collect();
                        let s = vt(&xs);
                        if !s.is_finite() {
                            return Err(DunklError::NonFinite(0));
                        }
                        sup = sup.max(s.abs());
                    }
                    free_conjugated_multiplication(basis, t, &vt)
                }
            };
            Ok((m * Complex64::new(w, 0.0), w * sup))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    let mut l1 = 0.0;
    for (m, s) in slices {
        b += m;
        l1 += s;
    }
    let operator = OperatorMatrix::new(basis.clone(), b);
    let value = schatten_norm(&operator, 2.0 * qprime)?;
    Ok(DualFunctional {
        operator,
        value,
        l1_linf: l1,
    })
}

/// Real profile functions on `R^d`.
#[derive(Clone)]
pub enum Profile {
    /// `amplitude * exp(-rate |x|^2)`.
    Gaussian { amplitude: f64, rate: f64 },
    /// `x_j`.
    Coordinate(usize),
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Gaussian { amplitude, rate } => f
                .debug_struct("Gaussian")
                .field("amplitude", amplitude)
                .field("rate", rate)
                .finish(),
            Profile::Coordinate(j) => f.debug_tuple("Coordinate").field(j).finish(),
            Profile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Profile {
    pub fn gaussian(amplitude: f64, rate: f64) -> Self {
        Profile::Gaussian { amplitude, rate }
    }

    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Gaussian { amplitude, rate } => {
                amplitude * (-rate * x.iter().map(|v| v * v).sum::<f64>()).exp()
            }
            Profile::Coordinate(j) => x[*j],
            Profile::Custom(f) => f(x),
        }
    }

    /// `sup |f|` when known in closed form.
    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            Profile::Gaussian { amplitude, .. } => Some(amplitude.abs()),
            _ => None,
        }
    }

    /// `||f||_{L^r_kappa}` in closed form (Gaussians only).
    pub fn lr_norm(&self, kappa: &[f64], r: f64) -> Result<f64> {
        if r.is_infinite() {
            return self
                .sup_norm()
                .ok_or_else(|| DunklError::Unsupported("sup norm of this profile".into()));
        }
        match self {
            Profile::Gaussian { amplitude, rate } if *rate > 0.0 => {
                // int e^{-r a |x|^2} h^2 = prod Gamma(k+1/2) (r a)^{-(k+1/2)}
                let log: f64 = kappa
                    .iter()
                    .map(|&k| ln_gamma(k + 0.5) - (k + 0.5) * (r * rate).ln())
                    .sum();
                Ok(amplitude.abs() * (log / r).exp())
            }
            _ => Err(DunklError::Unsupported(format!(
                "closed-form L^{r} norm of {self:?}"
            ))),
        }
    }
}

/// Matrix of `f(alpha x + beta p)` with `p = -i T` (one-parameter profile
/// `f` evaluated along the combined coordinate).
///
/// For `alpha != 0` this is `e^{-i tau Delta} f(alpha x) e^{i tau Delta}` with
/// `tau = beta / (2 alpha)`; for `alpha = 0` the quarter-period oscillator
/// rotation carries `x` to `p`, giving entries `e^{i pi (lambda_mu - lambda_nu)/4} f(beta x)`.
pub fn mixed_xp_operator(basis: &HermiteBasis, f: &Profile, alpha: f64, beta: f64) -> Result<OperatorMatrix> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(DunklError::Unsupported("non-finite symplectic parameters".into()));
    }
    if alpha == 0.0 && beta == 0.0 {
        let c = f.eval(&vec![0.0; basis.structure().d()]);
        return Ok(OperatorMatrix::identity(basis).scale(Complex64::new(c, 0.0)));
    }
    let (c, phase) = if alpha == 0.0 {
        (beta, FRAC_PI_4)
    } else {
        let tau = beta / (2.0 * alpha);
        (alpha * (1.0 + 4.0 * tau * tau).sqrt(), 0.5 * (2.0 * tau).atan())
    };
    let m = profile_matrix(basis, f, c);
    let l = basis.eigenvalues();
    let r = DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        Complex64::from_polar(m[(i, j)], phase * (l[i] - l[j]))
    });
    Ok(OperatorMatrix::new(basis.clone(), r))
}

/// Matrix of multiplication by `x -> f(c x)`; Gaussians are integrated on a
/// grid matched to their width.
pub fn profile_matrix(basis: &HermiteBasis, f: &Profile, c: f64) -> DMatrix<f64> {
    let scale = match f {
        Profile::Gaussian { rate, .. } if *rate > 0.0 => 1.0 / (1.0 + rate * c * c).sqrt(),
        _ => 1.0,
    };
    basis.multiplication_matrix_scaled(
        |x| {
            let y: Vec<f64> = x.iter().map(|v| v * c).collect();
            f.eval(&y)
        },
        scale,
    )
}

/// Both sides of the Schatten bound for `f(alpha x + beta p) g(gamma x + delta p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KssResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub determinant: f64,
}

/// `lhs = ||f(alpha x+beta p) g(gamma x+delta p)||_{S^r}`,
/// `rhs = M^{2/r} ||f||_r ||g||_r / |alpha delta - beta gamma|^{d_eff/r}`.
#[allow(clippy::too_many_arguments)]
pub fn kss_check(
    basis: &HermiteBasis,
    f: &Profile,
    g: &Profile,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    r: f64,
) -> Result<KssResult> {
    let det = kss_determinant(alpha, beta, gamma, delta, r)?;
    let a = mixed_xp_operator(basis, f, alpha, beta)?;
    let b = mixed_xp_operator(basis, g, gamma, delta)?;
    let lhs = schatten_norm(&a.compose(&b), r)?;
    kss_result(basis.structure(), f, g, lhs, det, r)
}

fn kss_determinant(alpha: f64, beta: f64, gamma: f64, delta: f64, r: f64) -> Result<f64> {
    let det = alpha * delta - beta * gamma;
    if det.abs() < 1e-14 {
        return Err(DunklError::DegenerateDeterminant(det));
    }
    if !(r >= 2.0) {
        return Err(DunklError::InvalidExponent(format!("r = {r} (need r >= 2)")));
    }
    Ok(det)
}

fn kss_result(s: &DunklStructure, f: &Profile, g: &Profile, lhs: f64, det: f64, r: f64) -> Result<KssResult> {
    let rhs = if r.is_infinite() {
        f.lr_norm(s.kappa(), r)? * g.lr_norm(s.kappa(), r)?
    } else {
        s.m_kappa().powf(2.0 / r) * f.lr_norm(s.kappa(), r)? * g.lr_norm(s.kappa(), r)?
            / det.abs().powf(s.d_eff() / r)
    };
    Ok(KssResult {
        lhs,
        rhs,
        ratio: lhs / rhs,
        determinant: det,
    })
}

/// [`kss_check`] without spectral truncation, for Gaussian profiles on the line.
///
/// The radial metaplectic action (oscillator rotations, free flows, chirps
/// and dilations are all unitary on `L^2_kappa`) carries the pair to
/// `f(sqrt|D| x) g(sqrt|D| p)` up to a sign of `D`, whose kernel is
/// `f(x)` times a Dunkl heat kernel. Its Schatten norm is computed by
/// Nystrom discretization on a panel rule.
#[allow(clippy::too_many_arguments)]
pub fn kss_check_reduced(
    s: &DunklStructure,
    f: &Profile,
    g: &Profile,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    r: f64,
) -> Result<KssResult> {
    let det = kss_determinant(alpha, beta, gamma, delta, r)?;
    if s.d() != 1 {
        return Err(DunklError::Unsupported("reduced KSS route needs d = 1".into()));
    }
    let (Profile::Gaussian { amplitude: af, rate: rf }, Profile::Gaussian { amplitude: ag, rate: rg }) = (f, g) else {
        return Err(DunklError::Unsupported("reduced KSS route needs Gaussian profiles".into()));
    };
    if !(*rf > 0.0 && *rg > 0.0) {
        return Err(DunklError::Unsupported("reduced KSS route needs decaying Gaussians".into()));
    }
    // f(c x) g(c p), c = sqrt|D|; g(c p) = ag e^{t Delta}, t = rg c^2
    let c2 = det.abs();
    let fr = rf * c2;
    let t = rg * c2;
    let width = (2.0 * t).sqrt();
    let h = width.min(1.0);
    let x_cut = 7.0 / fr.sqrt();
    let y_cut = x_cut + 7.0 * width;
    let kappa = s.kappa()[0];
    let (x, wx) = symmetric_power_rule(kappa, x_cut, (x_cut / h).ceil() as usize, 12);
    let (y, wy) = symmetric_power_rule(kappa, y_cut, (y_cut / h).ceil() as usize, 12);
    let rows: Vec<Vec<f64>> = x
        .par_iter()
        .zip(wx.par_iter())
        .map(|(&xi, &wi)| {
            let fx = wi.sqrt() * af * (-fr * xi * xi).exp();
            y.iter()
                .zip(&wy)
                .map(|(&yj, &wj)| {
                    let k = crate::free::heat_kernel(s, t, &[xi], &[yj]).unwrap_or(0.0);
                    fx * ag * k * wj.sqrt()
                })
                .collect()
        })
        .collect();
    let m = DMatrix::from_fn(x.len(), y.len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let lhs = if r.is_infinite() {
        sv.max()
    } else {
        sv.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    };
    kss_result(s, f, g, lhs, det, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::DunklStructure;

    fn basis() -> HermiteBasis {
        let s = DunklStructure::new(vec![0.5]).unwrap();
        HermiteBasis::with_oversampling(&s, 6, 1).unwrap()
    }

    #[test]
    fn diagonal_schatten() {
        let b = basis();
        let mut d = vec![Complex64::new(0.0, 0.0); b.len()];
        d[0] = Complex64::new(3.0, 0.0);
        d[1] = Complex64::new(0.0, -4.0);
        let a = OperatorMatrix::diagonal(&b, &d);
        assert!((a.schatten_norm(2.0).unwrap() - 5.0).abs() < 1e-13);
        assert!((a.schatten_norm(1.0).unwrap() - 7.0).abs() < 1e-13);
        assert!((a.schatten_norm(f64::INFINITY).unwrap() - 4.0).abs() < 1e-13);
        assert!(a.schatten_norm(0.5).is_err());
    }

    #[test]
    fn ground_state_density_mass() {
        let b = basis();
        let f = StateVector::basis_function(&b, 0);
        let g = OperatorMatrix::rank_one(&f, &f);
        let rho = density(&g);
        assert!((b.grid().integrate_free(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_kss_is_classical_identity() {
        let s = DunklStructure::new(vec![0.0]).unwrap();
        let f = Profile::gaussian(1.0, 1.0);
        let r = kss_check_reduced(&s, &f, &f, 1.0, 0.5, 0.2, 1.0, 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-10);
        let s = DunklStructure::new(vec![1.0]).unwrap();
        let r = kss_check_reduced(&s, &f, &f, 1.0, 0.5, 0.2, 1.0, 2.0).unwrap();
        assert!(r.ratio < 1.0);
        assert!(kss_check_reduced(&s, &f, &f, 1.0, 2.0, 0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn propagator_parse() {
        assert_eq!("Hermite".parse::<Propagator>().unwrap(), Propagator::Hermite);
        assert!("foo".parse::<Propagator>().is_err());
    }
}
