//! Python bindings: structure constants, kernels, Strichartz evaluations,
//! KSS and HLS checks, and the Hartree solver.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dunkl_core::config::HarnessConfig;
use dunkl_core::hartree::{approximate_identity, solve_hartree, HartreeConfig, Interaction};
use dunkl_core::hls::{mhls_check, symmetric_exponents, LineProfile};
use dunkl_core::operators::kss_check_reduced;
use dunkl_core::strichartz::{run_inequality, InequalityParams};
use dunkl_core::{DunklError, OperatorMatrix, Profile, StateVector};

fn err(e: DunklError) -> PyErr {
    match e {
        DunklError::Config(_) | DunklError::InvalidExponent(_) | DunklError::InvalidMultiplicity(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Multiplicities on `Z2^d`.
#[pyclass(frozen)]
struct Structure(dunkl_core::DunklStructure);

#[pymethods]
impl Structure {
    #[new]
    fn new(kappa: Vec<f64>) -> PyResult<Self> {
        dunkl_core::DunklStructure::new(kappa).map(Structure).map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn kappa(&self) -> Vec<f64> {
        self.0.kappa().to_vec()
    }

    #[getter]
    fn gamma_kappa(&self) -> f64 {
        self.0.gamma_kappa()
    }

    #[getter]
    fn d_eff(&self) -> f64 {
        self.0.d_eff()
    }

    #[getter]
    fn m_kappa(&self) -> f64 {
        self.0.m_kappa()
    }

    /// `E(a x, y)`.
    fn kernel(&self, a: Complex64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Complex64> {
        if x.len() != self.0.d() || y.len() != self.0.d() {
            return Err(PyValueError::new_err("points must have length d"));
        }
        Ok(self.0.kernel(a, &x, &y))
    }

    /// Kernel of `e^{-itH}` at `(x, y)`.
    fn oscillator_kernel(&self, t: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Complex64> {
        dunkl_core::hermite::kernel_kit(&self.0, t, &x, &y).map_err(err)
    }

    /// Closed form of `sum_mu phi_mu(x) phi_mu(y) w^{|mu|}`.
    fn generating_function(&self, w: Complex64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Complex64> {
        dunkl_core::hermite::mehler_closed_form(&self.0, w, &x, &y).map_err(err)
    }

    /// Relative residual of the oscillator/free kernel relation at `v`.
    fn lens_residual(&self, v: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        let r = dunkl_core::free::lens_relation_residual(&self.0, v, &x, &y).map_err(err)?;
        let k = dunkl_core::hermite::kernel_kit(&self.0, 0.5 * v.atan(), &x, &y).map_err(err)?;
        Ok(r / k.norm())
    }

    fn __repr__(&self) -> String {
        format!("Structure(kappa={:?})", self.0.kappa())
    }
}

/// Truncated generalized Hermite basis.
#[pyclass(frozen)]
struct Basis(dunkl_core::HermiteBasis);

#[pymethods]
impl Basis {
    #[new]
    #[pyo3(signature = (kappa, n, oversample = 2))]
    fn new(kappa: Vec<f64>, n: usize, oversample: usize) -> PyResult<Self> {
        let s = dunkl_core::DunklStructure::new(kappa).map_err(err)?;
        dunkl_core::HermiteBasis::with_oversampling(&s, n, oversample)
            .map(Basis)
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues().to_vec()
    }

    /// Largest entry of `G - I` for the Gram matrix `G`.
    fn gram_defect(&self) -> f64 {
        let g = self.0.gram();
        let mut m = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                m = m.max((g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        m
    }

    /// Values of all basis functions at `x`.
    fn evaluate(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.0.structure().d() {
            return Err(PyValueError::new_err("point must have length d"));
        }
        Ok(self.0.eval_point(&x))
    }

    /// `(e^{-itH} phi_k)(x)`.
    fn propagate_basis_function(&self, k: usize, t: f64, x: Vec<f64>) -> PyResult<Complex64> {
        if k >= self.0.len() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(StateVector::basis_function(&self.0, k).propagate(t).evaluate(&x))
    }
}

/// `(q, p, d_eff, admissible)` on the line `2/p + d_eff/q = d_eff`.
#[pyfunction]
fn admissible_p(q: f64, d_eff: f64) -> PyResult<(f64, f64, f64, bool)> {
    let e = dunkl_core::strichartz::admissible_p(q, d_eff).map_err(err)?;
    Ok((e.q, e.p, e.d_eff, e.admissible))
}

/// One Strichartz evaluation.
#[pyclass(frozen, get_all)]
struct StrichartzReport {
    kappa: Vec<f64>,
    n: usize,
    grid_order: usize,
    time_nodes: usize,
    propagator: String,
    system: String,
    coefficients: String,
    seed: u64,
    q: f64,
    p: f64,
    d_eff: f64,
    admissible: bool,
    j: usize,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    wall_time_s: f64,
}

#[pymethods]
impl StrichartzReport {
    fn __repr__(&self) -> String {
        format!(
            "StrichartzReport(q={}, p={}, J={}, lhs={:.6e}, rhs={:.6e}, ratio={:.6})",
            self.q, self.p, self.j, self.lhs, self.rhs, self.ratio
        )
    }
}

#[pyfunction]
#[pyo3(signature = (kappa, n, q, j, seed = 1, propagator = "hermite", system = "haar_rotation",
                    coefficients = "random_positive", time_nodes = 512))]
#[allow(clippy::too_many_arguments)]
fn strichartz(
    py: Python<'_>,
    kappa: Vec<f64>,
    n: usize,
    q: f64,
    j: usize,
    seed: u64,
    propagator: &str,
    system: &str,
    coefficients: &str,
    time_nodes: usize,
) -> PyResult<StrichartzReport> {
    let mut cfg = HarnessConfig::new(kappa, n).map_err(err)?;
    cfg.time_nodes = time_nodes;
    cfg.validate().map_err(err)?;
    let run = cfg.run_config(seed);
    let params = InequalityParams {
        propagator: propagator.parse().map_err(err)?,
        system: system.parse().map_err(err)?,
        coefficients: coefficients.parse().map_err(err)?,
        q,
        j,
        seed,
    };
    let r = py
        .detach(|| run.basis().and_then(|b| run_inequality(&run, &b, &params)))
        .map_err(err)?;
    Ok(StrichartzReport {
        kappa: r.config.kappa.clone(),
        n: r.config.n,
        grid_order: r.config.grid_order,
        time_nodes: r.config.time_nodes,
        propagator: r.propagator.to_string(),
        system: r.system.to_string(),
        coefficients: r.coefficients.to_string(),
        seed: r.seed,
        q: r.q,
        p: r.p,
        d_eff: r.d_eff,
        admissible: r.admissible,
        j: r.j,
        lhs: r.lhs,
        rhs: r.rhs,
        ratio: r.ratio,
        wall_time_s: r.wall_time_s,
    })
}

/// `(lhs, rhs, ratio)` for `f(ax+bp) g(cx+dp)` with `f = g = e^{-x^2}` on the line.
#[pyfunction]
#[pyo3(signature = (kappa, alpha, beta, gamma, delta, r = 2.0))]
fn kss(kappa: f64, alpha: f64, beta: f64, gamma: f64, delta: f64, r: f64) -> PyResult<(f64, f64, f64)> {
    let s = dunkl_core::DunklStructure::new(vec![kappa]).map_err(err)?;
    let f = Profile::gaussian(1.0, 1.0);
    let res = kss_check_reduced(&s, &f, &f, alpha, beta, gamma, delta, r).map_err(err)?;
    Ok((res.lhs, res.rhs, res.ratio))
}

/// `(lhs, rhs, ratio)` of the symmetric multilinear HLS form for indicators of `[0, 1]`
/// dilated by `scale`.
#[pyfunction]
#[pyo3(signature = (factors, r, scale = 1.0, nodes = 24))]
fn mhls_indicators(factors: usize, r: f64, scale: f64, nodes: usize) -> PyResult<(f64, f64, f64)> {
    if !(scale > 0.0) {
        return Err(PyValueError::new_err("scale must be positive"));
    }
    let (beta, rs) = symmetric_exponents(factors, r);
    let one = LineProfile::indicator(0.0, 1.0).map_err(err)?.dilate(scale);
    let res = mhls_check(&vec![one; factors], &beta, &rs, nodes).map_err(err)?;
    Ok((res.lhs, res.rhs, res.ratio))
}

/// Solves the Hartree equation from `sum_k occupations[k] |phi_k><phi_k|` with a
/// Gaussian approximate identity of the given width; returns per-iteration
/// `(iteration, residual, contraction, trace_drift)` and the convergence flag.
#[pyfunction]
#[pyo3(signature = (kappa, n, coupling, horizon = 0.1, steps = 20, width = 0.5,
                    occupations = vec![0.3, 0.2], q = 1.5))]
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn hartree(
    py: Python<'_>,
    kappa: f64,
    n: usize,
    coupling: f64,
    horizon: f64,
    steps: usize,
    width: f64,
    occupations: Vec<f64>,
    q: f64,
) -> PyResult<(Vec<(usize, f64, Option<f64>, f64)>, bool)> {
    let s = dunkl_core::DunklStructure::new(vec![kappa]).map_err(err)?;
    let b = dunkl_core::HermiteBasis::with_oversampling(&s, n, 2).map_err(err)?;
    if occupations.len() > b.len() || !(width > 0.0) {
        return Err(PyValueError::new_err("need width > 0 and at most len(basis) occupations"));
    }
    let gamma0 = occupations.iter().enumerate().fold(OperatorMatrix::zeros(&b), |acc, (k, &o)| {
        let f = StateVector::basis_function(&b, k);
        acc.add(&OperatorMatrix::rank_one(&f, &f).scale(Complex64::new(o, 0.0)))
    });
    let interaction = Interaction::DunklConvolution {
        w: approximate_identity(kappa, width),
        coupling,
    };
    let cfg = HartreeConfig::new(gamma0, horizon, steps, interaction, q).map_err(err)?;
    let sol = py.detach(|| solve_hartree(&cfg)).map_err(err)?;
    let diag = sol
        .diagnostics
        .iter()
        .map(|d| (d.iteration, d.residual, d.contraction, d.trace_drift))
        .collect();
    Ok((diag, sol.converged))
}

/// Parses and validates a config file; returns its normalized echo.
#[pyfunction]
fn config_echo(path: std::path::PathBuf) -> PyResult<String> {
    HarnessConfig::load(&path).map(|c| c.echo()).map_err(err)
}

#[pymodule]
fn dunkl_strichartz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Structure>()?;
    m.add_class::<Basis>()?;
    m.add_class::<StrichartzReport>()?;
    m.add_function(wrap_pyfunction!(admissible_p, m)?)?;
    m.add_function(wrap_pyfunction!(strichartz, m)?)?;
    m.add_function(wrap_pyfunction!(kss, m)?)?;
    m.add_function(wrap_pyfunction!(mhls_indicators, m)?)?;
    m.add_function(wrap_pyfunction!(hartree, m)?)?;
    m.add_function(wrap_pyfunction!(config_echo, m)?)?;
    Ok(())
}
