//! Picard iteration for the Hartree equation for density matrices on the
//! line, `i d/dt gamma = [H + W_gamma, gamma]`, with `W_gamma` a Dunkl
//! convolution of the density or a fixed potential.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl::dunkl_kernel_1d;
use crate::error::{DunklError, Result};
use crate::hermite::{hermite_functions_1d, HermiteBasis};
use crate::operators::{OperatorMatrix, Profile};
use crate::quadrature::{build_rule, symmetric_power_rule};

/// One-dimensional Dunkl transform realized by quadrature. Functions are
/// sampled on a fine input rule, transformed to a frequency grid and brought
/// back to the nodes of the basis grid.
///
/// `Df(xi) = M int f(x) E(-i xi, x) |x|^{2k} dx`, inverse with `E(i xi, x)`.
#[derive(Debug, Clone)]
pub struct DunklTransform {
    kappa: f64,
    m: f64,
    x_in: Vec<f64>,
    /// Basis functions at the input nodes, one row per node.
    table_in: DMatrix<f64>,
    x: Vec<f64>,
    xi: Vec<f64>,
    forward: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
}

impl DunklTransform {
    /// Frequencies on `[-cutoff, cutoff]`, split into `panels` panels per side
    /// of `nodes` Gauss points each; the `|xi|^{2k}` weight is absorbed by a
    /// Gauss-Jacobi rule on the panel touching the origin.
    pub fn new(basis: &HermiteBasis, input_order: usize, cutoff: f64, panels: usize, nodes: usize) -> Result<Self> {
        let s = basis.structure();
        if s.d() != 1 {
            return Err(DunklError::Unsupported(format!(
                "Dunkl transform quadrature needs d = 1, got {}",
                s.d()
            )));
        }
        if !(cutoff > 0.0) || panels == 0 || nodes == 0 {
            return Err(DunklError::Quadrature("empty frequency rule".into()));
        }
        let kappa = s.kappa()[0];
        let m = s.m_kappa();
        let x: Vec<f64> = basis.grid().points().iter().map(|p| p[0]).collect();
        let rule = build_rule(kappa, input_order)?;
        let x_in = rule.nodes().to_vec();
        let wx = rule.free_weights();
        let n = basis.degree();
        let rows: Vec<Vec<f64>> = x_in.iter().map(|&v| hermite_functions_1d(kappa, n, v)).collect();
        let table_in = DMatrix::from_fn(x_in.len(), n + 1, |k, j| rows[k][j]);
        let (xi, wxi) = symmetric_power_rule(kappa, cutoff, panels, nodes);
        let kern = |a: f64, y: f64| dunkl_kernel_1d(kappa, Complex64::new(0.0, a), y);
        let forward = DMatrix::from_fn(xi.len(), x_in.len(), |k, j| kern(-xi[k], x_in[j]) * (m * wx[j]));
        let inverse = DMatrix::from_fn(x.len(), xi.len(), |j, k| kern(xi[k], x[j]) * (m * wxi[k]));
        Ok(Self {
            kappa,
            m,
            x_in,
            table_in,
            x,
            xi,
            forward,
            inverse,
        })
    }

    /// Cutoff past the band of densities built from the basis.
    pub fn for_basis(basis: &HermiteBasis) -> Result<Self> {
        let n = basis.degree();
        let cutoff = 2.0 * (2.0 * n as f64 + 1.0).sqrt() + 8.0;
        Self::new(basis, 4 * (n + 1), cutoff, cutoff.ceil() as usize, 12)
    }

    /// Where [`Self::forward`] expects its samples.
    pub fn input_nodes(&self) -> &[f64] {
        &self.x_in
    }

    /// Basis grid nodes, where [`Self::inverse`] returns values.
    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Density of `gamma` at the input nodes.
    pub fn density_samples(&self, gamma: &OperatorMatrix) -> Vec<f64> {
        let t = self.table_in.map(|v| Complex64::new(v, 0.0));
        let b = &t * gamma.matrix();
        (0..t.nrows())
            .map(|k| b.row(k).iter().zip(self.table_in.row(k).iter()).map(|(c, &p)| c.re * p).sum())
            .collect()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.xi
    }

    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_iterator(samples.len(), samples.iter().map(|&s| Complex64::new(s, 0.0)));
        (&self.forward * v).iter().copied().collect()
    }

    /// Back to the basis grid.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(spectrum);
        (&self.inverse * v).iter().copied().collect()
    }

    /// Transform of a profile on the frequency grid; Gaussians in closed form.
    pub fn profile_spectrum(&self, w: &Profile) -> Vec<Complex64> {
        match w {
            Profile::Gaussian { amplitude, rate } if *rate > 0.0 => {
                let c = amplitude * (2.0 * rate).powf(-(self.kappa + 0.5));
                self.xi
                    .iter()
                    .map(|k| Complex64::new(c * (-k * k / (4.0 * rate)).exp(), 0.0))
                    .collect()
            }
            _ => {
                let samples: Vec<f64> = self.x_in.iter().map(|&x| w.eval(&[x])).collect();
                self.forward(&samples)
            }
        }
    }

    /// `w *_k rho` on the basis grid from `D(w * rho) = M^{-1} Dw Drho`;
    /// `rho` is sampled at [`Self::input_nodes`].
    pub fn convolve(&self, w: &Profile, rho: &[f64]) -> Vec<f64> {
        let dw = self.profile_spectrum(w);
        let dr = self.forward(rho);
        let prod: Vec<Complex64> = dw.iter().zip(&dr).map(|(a, b)| a * b / self.m).collect();
        self.inverse(&prod).iter().map(|c| c.re).collect()
    }
}

/// Gaussian `w` with `int w h^2 = 1` and `w ~ exp(-x^2 / width^2)`.
pub fn approximate_identity(kappa: f64, width: f64) -> Profile {
    let rate = 1.0 / (width * width);
    let amplitude = ((kappa + 0.5) * rate.ln() - statrs::function::gamma::ln_gamma(kappa + 0.5)).exp();
    Profile::gaussian(amplitude, rate)
}

/// Mean-field term of the equation.
#[derive(Debug, Clone)]
pub enum Interaction {
    /// `W = coupling * (w *_k rho_gamma)`.
    DunklConvolution { w: Profile, coupling: f64 },
    /// `W = coupling * V`, independent of the state.
    Multiplication { potential: Profile, coupling: f64 },
}

impl Interaction {
    pub fn coupling(&self) -> f64 {
        match self {
            Interaction::DunklConvolution { coupling, .. } | Interaction::Multiplication { coupling, .. } => *coupling,
        }
    }
}

/// `W(x)` on the basis grid for a density sampled at the transform's input nodes.
pub fn interaction_potential(transform: &DunklTransform, rho: &[f64], interaction: &Interaction) -> Vec<f64> {
    match interaction {
        Interaction::DunklConvolution { w, coupling } => {
            if *coupling == 0.0 {
                return vec![0.0; transform.nodes().len()];
            }
            transform.convolve(w, rho).into_iter().map(|v| coupling * v).collect()
        }
        Interaction::Multiplication { potential, coupling } => {
            transform.nodes().iter().map(|&x| coupling * potential.eval(&[x])).collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct HartreeConfig {
    pub gamma0: OperatorMatrix,
    pub horizon: f64,
    /// Number of time steps; the trajectory has `steps + 1` nodes.
    pub steps: usize,
    pub interaction: Interaction,
    pub q: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl HartreeConfig {
    pub fn new(gamma0: OperatorMatrix, horizon: f64, steps: usize, interaction: Interaction, q: f64) -> Result<Self> {
        let cfg = Self {
            gamma0,
            horizon,
            steps,
            interaction,
            q,
            tolerance: 1e-8,
            max_iterations: 50,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.gamma0.self_adjoint_defect();
        if defect > 1e-12 {
            return Err(DunklError::NotSelfAdjoint(defect));
        }
        if !(self.horizon > 0.0 && self.horizon <= 1.0) {
            return Err(DunklError::Config(format!("horizon {} outside (0, 1]", self.horizon)));
        }
        if self.steps == 0 {
            return Err(DunklError::Config("steps must be positive".into()));
        }
        if !(self.q >= 1.0) {
            return Err(DunklError::InvalidExponent(format!("q = {} < 1", self.q)));
        }
        if self.gamma0.basis().structure().d() != 1 {
            return Err(DunklError::Unsupported("Hartree solver is one-dimensional".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.horizon / self.steps as f64;
        (0..=self.steps).map(|k| k as f64 * h).collect()
    }

    pub fn schatten_exponent(&self) -> f64 {
        2.0 * self.q / (self.q + 1.0)
    }
}

/// `e^{-itH} gamma0 e^{itH}` at every node.
pub fn free_trajectory(cfg: &HartreeConfig) -> Vec<OperatorMatrix> {
    cfg.times().iter().map(|&t| cfg.gamma0.conjugate_hermite(t)).collect()
}

/// One application of the Duhamel map
/// `gamma0(t) - i int_0^t e^{-i(t-s)H} [W(s), gamma(s)] e^{i(t-s)H} ds`,
/// integrated in the interaction picture with the trapezoid rule.
pub fn picard_step(traj: &[OperatorMatrix], cfg: &HartreeConfig, transform: &DunklTransform) -> Vec<OperatorMatrix> {
    let times = cfg.times();
    assert_eq!(traj.len(), times.len(), "trajectory does not match the time grid");
    let basis = cfg.gamma0.basis();
    let pulled: Vec<DMatrix<Complex64>> = traj
        .par_iter()
        .zip(times.par_iter())
        .map(|(g, &t)| {
            let w = interaction_potential(transform, &transform.density_samples(g), &cfg.interaction);
            let wm = basis.multiplication_matrix(&w).map(|v| Complex64::new(v, 0.0));
            let c = &wm * g.matrix() - g.matrix() * &wm;
            OperatorMatrix::new(basis.clone(), c).conjugate_hermite(-t).into_matrix()
        })
        .collect();
    let h = cfg.horizon / cfg.steps as f64;
    let mi = Complex64::new(0.0, -0.5 * h);
    let mut acc = cfg.gamma0.matrix().clone();
    let mut interaction_picture = Vec::with_capacity(times.len());
    interaction_picture.push(acc.clone());
    for k in 1..times.len() {
        acc += (&pulled[k - 1] + &pulled[k]) * mi;
        interaction_picture.push(acc.clone());
    }
    interaction_picture
        .into_par_iter()
        .zip(times.par_iter())
        .map(|(g, &t)| OperatorMatrix::new(basis.clone(), g).conjugate_hermite(t))
        .collect()
}

/// Per-iteration record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub iteration: usize,
    /// `sup_t ||gamma_{n}(t) - gamma_{n-1}(t)||` in the Schatten exponent `2q/(q+1)`.
    pub residual: f64,
    /// Ratio of this residual to the previous one.
    pub contraction: Option<f64>,
    pub trace_drift: f64,
    pub self_adjoint_defect: f64,
    pub schatten_sup: f64,
}

#[derive(Debug, Clone)]
pub struct HartreeSolution {
    pub times: Vec<f64>,
    pub trajectory: Vec<OperatorMatrix>,
    pub diagnostics: Vec<IterationDiagnostics>,
    pub converged: bool,
}

impl HartreeSolution {
    pub fn iterations(&self) -> usize {
        self.diagnostics.len()
    }

    /// Largest contraction factor seen after the first two iterations.
    pub fn max_contraction(&self) -> Option<f64> {
        self.diagnostics
            .iter()
            .filter_map(|d| d.contraction)
            .filter(|c| c.is_finite())
            .reduce(f64::max)
    }

    pub fn trace_drift(&self) -> f64 {
        trace_drift(&self.trajectory)
    }
}

fn trace_drift(traj: &[OperatorMatrix]) -> f64 {
    let t0 = traj[0].trace();
    traj.iter().map(|g| (g.trace() - t0).norm()).fold(0.0, f64::max)
}

/// Iterates [`picard_step`] from the free evolution until the residual drops
/// below `cfg.tolerance` or `cfg.max_iterations` is reached.
pub fn solve_hartree(cfg: &HartreeConfig) -> Result<HartreeSolution> {
    cfg.validate()?;
    let basis = cfg.gamma0.basis();
    let transform = DunklTransform::for_basis(basis)?;
    let p = cfg.schatten_exponent();
    let mut traj = free_trajectory(cfg);
    let mut diagnostics: Vec<IterationDiagnostics> = Vec::new();
    let mut converged = false;
    for iteration in 1..=cfg.max_iterations {
        let next = picard_step(&traj, cfg, &transform);
        let residual = next
            .par_iter()
            .zip(traj.par_iter())
            .map(|(a, b)| {
                OperatorMatrix::new(basis.clone(), a.matrix() - b.matrix()).schatten_norm(p)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let schatten_sup = next
            .par_iter()
            .map(|g| g.schatten_norm(p))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let contraction = diagnostics
            .last()
            .filter(|d| d.residual > 0.0)
            .map(|d| residual / d.residual);
        diagnostics.push(IterationDiagnostics {
            iteration,
            residual,
            contraction,
            trace_drift: trace_drift(&next),
            self_adjoint_defect: next.iter().map(|g| g.self_adjoint_defect()).fold(0.0, f64::max),
            schatten_sup,
        });
        traj = next;
        if !residual.is_finite() {
            return Err(DunklError::NonFinite(iteration));
        }
        if residual < cfg.tolerance {
            converged = true;
            break;
        }
    }
    Ok(HartreeSolution {
        times: cfg.times(),
        trajectory: traj,
        diagnostics,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::DunklStructure;
    use crate::hermite::StateVector;
    use crate::operators::density;

    fn basis(kappa: f64, n: usize) -> HermiteBasis {
        HermiteBasis::with_oversampling(&DunklStructure::uniform(1, kappa).unwrap(), n, 2).unwrap()
    }

    #[test]
    fn classical_gaussian_convolution() {
        let b = basis(0.0, 24);
        let tr = DunklTransform::for_basis(&b).unwrap();
        let rho: Vec<f64> = tr.input_nodes().iter().map(|x| (-x * x).exp()).collect();
        let w = Profile::gaussian(1.0, 1.0);
        let conv = tr.convolve(&w, &rho);
        for (x, c) in tr.nodes().iter().zip(&conv) {
            let exact = (std::f64::consts::PI / 2.0).sqrt() * (-x * x / 2.0).exp();
            assert!((c - exact).abs() < 1e-8, "x={x}: {c} vs {exact}");
        }
    }

    // L^2_k over |x| <= 5, where the densities below live
    fn l2(b: &HermiteBasis, v: &[f64]) -> f64 {
        b.grid()
            .free_weights()
            .iter()
            .zip(b.grid().points())
            .zip(v)
            .filter(|((_, p), _)| p[0].abs() <= 5.0)
            .map(|((w, _), x)| w * x * x)
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn mollifier_limit() {
        for kappa in [0.0, 0.5, 1.5] {
            let b = basis(kappa, 16);
            let tr = DunklTransform::for_basis(&b).unwrap();
            let g = OperatorMatrix::rank_one(&StateVector::basis_function(&b, 0), &StateVector::basis_function(&b, 0));
            let rho = density(&g);
            let w = tr.convolve(&approximate_identity(kappa, 0.05), &tr.density_samples(&g));
            let diff: Vec<f64> = w.iter().zip(&rho).map(|(a, r)| a - r).collect();
            let gap = l2(&b, &diff);
            // leading term (width^2/4) Delta_k rho, Delta_k e^{-x^2} = (4x^2 - 2 - 4k) e^{-x^2}
            let g0 = statrs::function::gamma::gamma(kappa + 0.5);
            let lap: Vec<f64> = b
                .grid()
                .points()
                .iter()
                .map(|p| (4.0 * p[0] * p[0] - 2.0 - 4.0 * kappa) * (-p[0] * p[0]).exp() / g0)
                .collect();
            let predicted = 0.05f64.powi(2) / 4.0 * l2(&b, &lap);
            assert!((gap - predicted).abs() < 0.05 * predicted, "kappa={kappa}: {gap} vs {predicted}");
            if kappa == 0.0 {
                assert!(gap < 1e-3);
            }
            let zero = tr.convolve(&Profile::gaussian(1.0, 1.0), &vec![0.0; tr.input_nodes().len()]);
            assert!(zero.iter().all(|&v| v == 0.0));
        }
    }

    fn small_state(b: &HermiteBasis) -> OperatorMatrix {
        let f = StateVector::basis_function(b, 0);
        let g = StateVector::basis_function(b, 1);
        OperatorMatrix::rank_one(&f, &f)
            .scale(Complex64::new(0.3, 0.0))
            .add(&OperatorMatrix::rank_one(&g, &g).scale(Complex64::new(0.2, 0.0)))
    }

    #[test]
    fn zero_coupling_is_free_flow() {
        let b = basis(0.5, 12);
        let cfg = HartreeConfig::new(
            small_state(&b),
            0.1,
            20,
            Interaction::DunklConvolution { w: Profile::gaussian(1.0, 1.0), coupling: 0.0 },
            1.5,
        )
        .unwrap();
        let sol = solve_hartree(&cfg).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations(), 1);
        let p = cfg.schatten_exponent();
        let n0 = cfg.gamma0.schatten_norm(p).unwrap();
        for g in &sol.trajectory {
            assert!((g.schatten_norm(p).unwrap() - n0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_data_contracts() {
        let b = basis(0.5, 12);
        let cfg = HartreeConfig::new(
            small_state(&b),
            0.1,
            20,
            Interaction::DunklConvolution { w: Profile::gaussian(1.0, 1.0), coupling: 1.0 },
            1.5,
        )
        .unwrap();
        let sol = solve_hartree(&cfg).unwrap();
        assert!(sol.converged, "{:?}", sol.diagnostics);
        assert!(sol.trace_drift() < 1e-8);
        assert!(sol.max_contraction().unwrap() < 1.0);
        for d in &sol.diagnostics {
            assert!(d.self_adjoint_defect < 1e-10);
        }
    }

    #[test]
    fn transform_of_hermite_functions() {
        for kappa in [0.0, 0.5, 1.5] {
            let b = basis(kappa, 12);
            let tr = DunklTransform::new(&b, 40, 6.0, 6, 12).unwrap();
            for n in 0..6 {
                let samples: Vec<f64> = tr
                    .input_nodes()
                    .iter()
                    .map(|&x| hermite_functions_1d(kappa, n, x)[n])
                    .collect();
                let spec = tr.forward(&samples);
                let phase = Complex64::new(0.0, -1.0).powu(n as u32);
                for (xi, v) in tr.frequencies().iter().zip(&spec).filter(|(xi, _)| xi.abs() < 4.0) {
                    let want = phase * b.eval_point(&[*xi])[n];
                    assert!((v - want).norm() < 1e-9, "kappa={kappa} n={n} xi={xi}");
                }
            }
        }
    }
}
