//! Orthonormal Strichartz inequalities: exponent bookkeeping, random
//! orthonormal systems, both sides of the estimate, the inhomogeneous
//! corollary and exponent sweeps.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl::DunklStructure;
use crate::error::{DunklError, Result};
use crate::free::free_density_norm;
use crate::hermite::HermiteBasis;
use crate::operators::{density, schatten_norm, OperatorMatrix, OrthonormalSystem, Propagator};
use crate::quadrature::{lp_over_time, weighted_lp_norm, TimeRule};

/// Strichartz pair on the line `2/p + d_eff/q = d_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub q: f64,
    pub p: f64,
    pub d_eff: f64,
    pub admissible: bool,
}

impl ExponentPair {
    /// Upper end of the admissible window, `(d_eff+1)/(d_eff-1)` (infinite for `d_eff <= 1`).
    pub fn upper_q(d_eff: f64) -> f64 {
        if d_eff <= 1.0 {
            f64::INFINITY
        } else {
            (d_eff + 1.0) / (d_eff - 1.0)
        }
    }

    /// `2/p + d_eff/q - d_eff`; zero up to rounding.
    pub fn scaling_defect(&self) -> f64 {
        let inv_p = if self.p.is_infinite() { 0.0 } else { 1.0 / self.p };
        2.0 * inv_p + self.d_eff / self.q - self.d_eff
    }

    /// Exponent `2q/(q+1)` of the coefficient norm.
    pub fn coefficient_exponent(&self) -> f64 {
        2.0 * self.q / (self.q + 1.0)
    }
}

/// `p = 2q / (d_eff (q - 1))`, with `q = 1` giving `p = inf`.
pub fn admissible_p(q: f64, d_eff: f64) -> Result<ExponentPair> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(DunklError::InvalidExponent(format!("q = {q} (need 1 <= q < inf)")));
    }
    let p = if q == 1.0 {
        f64::INFINITY
    } else {
        2.0 * q / (d_eff * (q - 1.0))
    };
    Ok(ExponentPair {
        q,
        p,
        d_eff,
        admissible: q < ExponentPair::upper_q(d_eff),
    })
}

/// `(sum |n_j|^{2q/(q+1)})^{(q+1)/(2q)}`.
pub fn schatten_rhs(coeffs: &[f64], q: f64) -> f64 {
    let r = 2.0 * q / (q + 1.0);
    coeffs.iter().map(|n| n.abs().powf(r)).sum::<f64>().powf(1.0 / r)
}

/// How the orthonormal functions are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// The first `J` basis functions by energy.
    BasisSubset,
    /// `J` columns of a Haar-random unitary on the truncated space.
    HaarRotation,
    /// Random coherent Gaussian packets projected and orthonormalized.
    GaussianOrthogonalized,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::BasisSubset => "basis_subset",
            SystemKind::HaarRotation => "haar_rotation",
            SystemKind::GaussianOrthogonalized => "gaussian_orthogonalized",
        })
    }
}

impl FromStr for SystemKind {
    type Err = DunklError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basis_subset" | "basis" => Ok(SystemKind::BasisSubset),
            "haar_rotation" | "haar" => Ok(SystemKind::HaarRotation),
            "gaussian_orthogonalized" | "gaussian" => Ok(SystemKind::GaussianOrthogonalized),
            other => Err(DunklError::Config(format!("unknown system kind {other:?}"))),
        }
    }
}

/// How the weights `n_j` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Ones,
    RandomPositive,
    RandomSigned,
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoefficientMode::Ones => "ones",
            CoefficientMode::RandomPositive => "random_positive",
            CoefficientMode::RandomSigned => "random_signed",
        })
    }
}

impl FromStr for CoefficientMode {
    type Err = DunklError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(CoefficientMode::Ones),
            "random_positive" | "positive" => Ok(CoefficientMode::RandomPositive),
            "random_signed" | "signed" => Ok(CoefficientMode::RandomSigned),
            other => Err(DunklError::Config(format!("unknown coefficient mode {other:?}"))),
        }
    }
}

/// Basis indices sorted by `|mu|`, ties by flat index.
fn energy_order(basis: &HermiteBasis) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by_key(|&i| (basis.multi_indices()[i].iter().sum::<usize>(), i));
    idx
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Centers and momenta of wave packets are drawn from `(-r, r)`.
const PACKET_RANGE: f64 = 6.0;

/// Draws `j` orthonormal functions; deterministic for a given seed.
pub fn generate_system(
    basis: &HermiteBasis,
    kind: SystemKind,
    j: usize,
    seed: u64,
    mode: CoefficientMode,
) -> Result<OrthonormalSystem> {
    let dim = basis.len();
    if j > dim {
        return Err(DunklError::SystemTooLarge {
            requested: j,
            available: dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors = match kind {
        SystemKind::BasisSubset => {
            let order = energy_order(basis);
            let mut m = DMatrix::<Complex64>::zeros(dim, j);
            for (c, &i) in order.iter().take(j).enumerate() {
                m[(i, c)] = Complex64::new(1.0, 0.0);
            }
            m
        }
        SystemKind::HaarRotation => {
            let g = DMatrix::from_fn(dim, j, |_, _| complex_gaussian(&mut rng));
            let qr = g.qr();
            let (mut q, r) = qr.unpack();
            // phase fix makes the distribution Haar
            for c in 0..j {
                let d = r[(c, c)];
                let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
                let mut col = q.column_mut(c);
                col *= ph;
            }
            q.columns(0, j).into_owned()
        }
        SystemKind::GaussianOrthogonalized => {
            let d = basis.structure().d();
            let grid = basis.grid();
            let w = grid.free_weights();
            let table = basis.table();
            let mut m = DMatrix::<Complex64>::zeros(dim, j);
            let mut accepted = 0;
            let mut attempts = 0;
            // greedy: keep a wave packet only if a fair part of it is new
            while accepted < j {
                attempts += 1;
                if attempts > 100 * j {
                    return Err(DunklError::Shape(format!(
                        "only {accepted} of {j} wave packets are independent"
                    )));
                }
                let center: Vec<f64> = (0..d).map(|_| rng.random_range(-PACKET_RANGE..PACKET_RANGE)).collect();
                let momentum: Vec<f64> = (0..d).map(|_| rng.random_range(-PACKET_RANGE..PACKET_RANGE)).collect();
                let mut v = nalgebra::DVector::<Complex64>::zeros(dim);
                for (k, x) in grid.points().iter().enumerate() {
                    let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
                    let phase: f64 = x.iter().zip(&momentum).map(|(a, b)| a * b).sum();
                    let g = Complex64::from_polar((-0.5 * r2).exp() * w[k], phase);
                    for mu in 0..dim {
                        v[mu] += g * table[(k, mu)];
                    }
                }
                let before = v.norm();
                for _ in 0..2 {
                    for c in 0..accepted {
                        let proj = m.column(c).dotc(&v);
                        v -= m.column(c) * proj;
                    }
                }
                let after = v.norm();
                if before > 0.0 && after > 0.05 * before {
                    m.set_column(accepted, &v.unscale(after));
                    accepted += 1;
                }
            }
            m
        }
    };
    let coeffs = (0..j)
        .map(|_| match mode {
            CoefficientMode::Ones => 1.0,
            CoefficientMode::RandomPositive => rng.random_range(0.1..1.0),
            CoefficientMode::RandomSigned => {
                let v: f64 = rng.random_range(0.1..1.0);
                if rng.random::<bool>() {
                    v
                } else {
                    -v
                }
            }
        })
        .collect();
    OrthonormalSystem::new(basis.clone(), vectors, coeffs)
}

/// Time domain for the oscillator flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeWindow {
    /// `(-pi/4, pi/4)`
    Quarter,
    /// `(-pi/2, pi/2)`
    Half,
    /// `(-pi, pi)`
    Full,
}

impl TimeWindow {
    pub fn half_width(&self) -> f64 {
        match self {
            TimeWindow::Quarter => FRAC_PI_4,
            TimeWindow::Half => 0.5 * PI,
            TimeWindow::Full => PI,
        }
    }

    pub fn rule(&self, nodes: usize) -> TimeRule {
        let h = self.half_width();
        TimeRule::periodic(-h, h, nodes)
    }
}

impl FromStr for TimeWindow {
    type Err = DunklError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quarter" => Ok(TimeWindow::Quarter),
            "half" => Ok(TimeWindow::Half),
            "full" | "torus" => Ok(TimeWindow::Full),
            other => Err(DunklError::Config(format!("unknown time window {other:?}"))),
        }
    }
}

/// `|| sum_j n_j |e^{-itH} f_j|^2 ||_{L^q_kappa}` at each node of `time`.
pub fn density_norms_in_time(sys: &OrthonormalSystem, time: &TimeRule, q: f64) -> Result<Vec<f64>> {
    let basis = sys.basis();
    let table = basis.table().map(|v| Complex64::new(v, 0.0));
    let l = basis.eigenvalues();
    let n = sys.coeffs();
    time.nodes
        .par_iter()
        .map(|&t| {
            let mut c = sys.vectors().clone();
            for (mu, mut row) in c.row_iter_mut().enumerate() {
                row *= Complex64::from_polar(1.0, -t * l[mu]);
            }
            let vals = &table * c;
            let rho: Vec<f64> = vals
                .row_iter()
                .map(|r| r.iter().zip(n).map(|(v, nj)| nj * v.norm_sqr()).sum())
                .collect();
            weighted_lp_norm(basis.grid(), &rho, q)
        })
        .collect()
}

/// Left side `|| sum_j n_j |e^{-itP} f_j|^2 ||_{L^p_t L^q_x}`.
///
/// For the Laplacian the time integral over the line is carried to
/// `(-pi/4, pi/4)` by the lens substitution, on which the oscillator
/// density norms are integrated with `time_nodes` nodes.
pub fn strichartz_lhs(
    sys: &OrthonormalSystem,
    p: Propagator,
    pair: &ExponentPair,
    window: TimeWindow,
    time_nodes: usize,
) -> Result<f64> {
    let rule = match p {
        Propagator::Hermite => window.rule(time_nodes),
        Propagator::Laplacian => TimeWindow::Quarter.rule(time_nodes),
    };
    let vals = density_norms_in_time(sys, &rule, pair.q)?;
    Ok(lp_over_time(&rule, &vals, pair.p))
}

/// Laplacian left side computed on the free side: free-flow densities
/// sampled on dilated grids, integrated over `s in R` through `s = tan(2 tau)/2`.
pub fn laplacian_lhs_via_free_flow(sys: &OrthonormalSystem, pair: &ExponentPair, gauss_nodes: usize, panels: usize) -> Result<f64> {
    let half = TimeRule::composite_gauss_legendre(0.0, FRAC_PI_4, panels, gauss_nodes);
    let mut total = 0.0;
    let mut sup = 0.0f64;
    for sign in [1.0, -1.0] {
        for (&tau, &w) in half.nodes.iter().zip(&half.weights) {
            let s = sign * 0.5 * (2.0 * tau).tan();
            let jac = 1.0 + (2.0 * tau).tan().powi(2);
            let norm = free_system_density_norm(sys, s, pair.q)?;
            sup = sup.max(norm);
            if pair.p.is_finite() {
                total += w * jac * norm.powf(pair.p);
            }
        }
    }
    Ok(if pair.p.is_finite() { total.powf(1.0 / pair.p) } else { sup })
}

fn free_system_density_norm(sys: &OrthonormalSystem, s: f64, q: f64) -> Result<f64> {
    if sys.len() == 1 {
        let f = sys.function(0);
        return Ok(sys.coeffs()[0].abs() * free_density_norm(&f, s, q)?);
    }
    // density of e^{is Delta} gamma e^{-is Delta} on the dilated grid
    let gamma = sys.operator();
    let ev = crate::operators::evolved_density(&gamma, s, Propagator::Laplacian);
    weighted_lp_norm(&ev.grid, &ev.values, q)
}

/// Echo of the run configuration embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub kappa: Vec<f64>,
    /// Per-coordinate truncation degree.
    pub n: usize,
    /// Spatial rule order per coordinate.
    pub grid_order: usize,
    pub time_nodes: usize,
    pub window: TimeWindow,
    pub seed: u64,
}

impl RunConfig {
    pub fn d(&self) -> usize {
        self.kappa.len()
    }

    pub fn structure(&self) -> Result<DunklStructure> {
        DunklStructure::new(self.kappa.clone())
    }

    pub fn basis(&self) -> Result<HermiteBasis> {
        let s = self.structure()?;
        let grid = crate::quadrature::TensorGrid::new(&s, self.grid_order)?;
        HermiteBasis::new(&s, self.n, grid)
    }
}

/// One evaluation of the orthonormal Strichartz inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub config: RunConfig,
    pub propagator: Propagator,
    pub system: SystemKind,
    pub coefficients: CoefficientMode,
    pub seed: u64,
    pub q: f64,
    pub p: f64,
    pub d_eff: f64,
    pub admissible: bool,
    pub j: usize,
    /// `|| rho ||_{L^p_t L^q_x}` (the norm, not its p-th power).
    pub lhs: f64,
    /// `|| n ||_{l^{2q/(q+1)}}`.
    pub rhs: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    pub wall_time_s: f64,
}

/// Parameters of a single inequality evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityParams {
    pub propagator: Propagator,
    pub system: SystemKind,
    pub coefficients: CoefficientMode,
    pub q: f64,
    pub j: usize,
    pub seed: u64,
}

/// Evaluates both sides for a freshly drawn system.
pub fn run_inequality(cfg: &RunConfig, basis: &HermiteBasis, params: &InequalityParams) -> Result<StrichartzReport> {
    let sys = generate_system(basis, params.system, params.j, params.seed, params.coefficients)?;
    evaluate_system(cfg, &sys, params)
}

/// Evaluates both sides for a given system.
pub fn evaluate_system(cfg: &RunConfig, sys: &OrthonormalSystem, params: &InequalityParams) -> Result<StrichartzReport> {
    let start = Instant::now();
    let d_eff = sys.basis().structure().d_eff();
    let pair = admissible_p(params.q, d_eff)?;
    let lhs = strichartz_lhs(sys, params.propagator, &pair, cfg.window, cfg.time_nodes)?;
    let rhs = schatten_rhs(sys.coeffs(), params.q);
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(StrichartzReport {
        config: cfg.clone(),
        propagator: params.propagator,
        system: params.system,
        coefficients: params.coefficients,
        seed: params.seed,
        q: pair.q,
        p: pair.p,
        d_eff,
        admissible: pair.admissible,
        j: sys.len(),
        lhs,
        rhs,
        ratio,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `q` values `q_min + k (q_max - q_min)/(steps-1)`.
pub fn q_grid(q_min: f64, q_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![q_min];
    }
    (0..steps)
        .map(|k| q_min + (q_max - q_min) * k as f64 / (steps - 1) as f64)
        .collect()
}

/// Runs every `(q, J, seed)` combination; results are ordered by `q`, then `J`, then seed.
pub fn sweep(
    cfg: &RunConfig,
    basis: &HermiteBasis,
    template: &InequalityParams,
    qs: &[f64],
    js: &[usize],
    seeds: &[u64],
) -> Result<Vec<StrichartzReport>> {
    let jobs: Vec<(f64, usize, u64)> = qs
        .iter()
        .flat_map(|&q| js.iter().flat_map(move |&j| seeds.iter().map(move |&s| (q, j, s))))
        .collect();
    jobs.par_iter()
        .map(|&(q, j, seed)| {
            let params = InequalityParams {
                q,
                j,
                seed,
                ..template.clone()
            };
            run_inequality(cfg, basis, &params)
        })
        .collect()
}

/// Envelope of ratios across a sweep at fixed `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEnvelope {
    pub q: f64,
    pub min: f64,
    pub max: f64,
}

pub fn ratio_envelopes(reports: &[StrichartzReport]) -> Vec<RatioEnvelope> {
    let mut out: Vec<RatioEnvelope> = Vec::new();
    for r in reports {
        match out.iter_mut().find(|e| e.q == r.q) {
            Some(e) => {
                e.min = e.min.min(r.ratio);
                e.max = e.max.max(r.ratio);
            }
            None => out.push(RatioEnvelope {
                q: r.q,
                min: r.ratio,
                max: r.ratio,
            }),
        }
    }
    out
}

/// Outcome of the inhomogeneous estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InhomogeneousResult {
    /// `|| rho_{gamma(t)} ||_{L^p_t L^q_x((-pi,pi) x R^d)}`.
    pub lhs: f64,
    /// `|| int e^{isH} |R(s)| e^{-isH} ds ||_{S^{2q/(q+1)}}`.
    pub rhs: f64,
    pub ratio: f64,
    /// Largest self-adjointness defect of the time-averaged source.
    pub source_defect: f64,
}

/// Solution of `d/dt gamma = i[H, gamma] + R(t)`, `gamma(t0) = 0`:
/// `gamma(t) = int_{t0}^t e^{i(t-s)H} R(s) e^{-i(t-s)H} ds`, at every node of `time`
/// (sorted, all `>= t0`). The interaction-picture integrand is advanced with
/// `gauss_nodes` Gauss-Legendre nodes between consecutive time nodes.
pub fn duhamel_trajectory(
    source: &(dyn Fn(f64) -> OperatorMatrix + Sync),
    basis: &HermiteBasis,
    time: &TimeRule,
    t0: f64,
    gauss_nodes: usize,
) -> Result<Vec<OperatorMatrix>> {
    let l = basis.eigenvalues();
    let n = basis.len();
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    let mut prev = t0;
    let mut out = Vec::with_capacity(time.len());
    for &t in &time.nodes {
        if t < prev {
            return Err(DunklError::Shape("time nodes must be sorted and >= t0".into()));
        }
        if t > prev {
            let panel = TimeRule::gauss_legendre(prev, t, gauss_nodes);
            for (&s, &w) in panel.nodes.iter().zip(&panel.weights) {
                let r = source(s);
                let defect = r.self_adjoint_defect();
                if defect > 1e-10 {
                    return Err(DunklError::NotSelfAdjoint(defect));
                }
                let rm = r.matrix();
                for i in 0..n {
                    for j in 0..n {
                        q[(i, j)] += rm[(i, j)] * Complex64::from_polar(w, -s * (l[i] - l[j]));
                    }
                }
            }
        }
        let g = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * Complex64::from_polar(1.0, t * (l[i] - l[j])));
        out.push(OperatorMatrix::new(basis.clone(), g));
        prev = t;
    }
    Ok(out)
}

/// Closed form of [`duhamel_trajectory`] for a time-independent source:
/// `gamma_{mu nu}(t) = R_{mu nu} (e^{i w (t - t0)} - 1)/(i w)`, `w = lambda_mu - lambda_nu`.
pub fn duhamel_constant_source(r: &OperatorMatrix, t: f64, t0: f64) -> OperatorMatrix {
    let l = r.basis().eigenvalues();
    let m = DMatrix::from_fn(r.dim(), r.dim(), |i, j| {
        let w = l[i] - l[j];
        let factor = if w == 0.0 {
            Complex64::new(t - t0, 0.0)
        } else {
            (Complex64::from_polar(1.0, w * (t - t0)) - 1.0) / Complex64::new(0.0, w)
        };
        r.matrix()[(i, j)] * factor
    });
    OperatorMatrix::new(r.basis().clone(), m)
}

/// Both sides of the inhomogeneous estimate on `(-pi, pi)` with `t0 = -pi`.
pub fn inhomogeneous_check(
    source: &(dyn Fn(f64) -> OperatorMatrix + Sync),
    basis: &HermiteBasis,
    q: f64,
    time_nodes: usize,
    gauss_nodes: usize,
) -> Result<InhomogeneousResult> {
    let pair = admissible_p(q, basis.structure().d_eff())?;
    let time = TimeRule::periodic(-PI, PI, time_nodes);
    let traj = duhamel_trajectory(source, basis, &time, -PI, gauss_nodes)?;
    let norms = traj
        .par_iter()
        .map(|g| weighted_lp_norm(basis.grid(), &density(g), q))
        .collect::<Result<Vec<_>>>()?;
    let lhs = lp_over_time(&time, &norms, pair.p);

    // int_{-pi}^{pi} e^{isH} |R(s)| e^{-isH} ds on the same nodes
    let l = basis.eigenvalues();
    let n = basis.len();
    let mut avg = DMatrix::<Complex64>::zeros(n, n);
    let panels = TimeRule::composite_gauss_legendre(-PI, PI, time_nodes.max(1), gauss_nodes);
    for (&s, &w) in panels.nodes.iter().zip(&panels.weights) {
        let a = source(s).abs_self_adjoint()?;
        let am = a.matrix();
        for i in 0..n {
            for j in 0..n {
                avg[(i, j)] += am[(i, j)] * Complex64::from_polar(w, s * (l[i] - l[j]));
            }
        }
    }
    let avg = OperatorMatrix::new(basis.clone(), avg);
    let rhs = schatten_norm(&avg, pair.coefficient_exponent())?;
    Ok(InhomogeneousResult {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        source_defect: avg.self_adjoint_defect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let e = admissible_p(1.0, 2.0).unwrap();
        assert!(e.p.is_infinite() && e.admissible);
        let e = admissible_p(1.5, 3.0).unwrap();
        assert!((e.p - 2.0).abs() < 1e-15);
        assert!(e.scaling_defect().abs() < 1e-14);
        assert!(!admissible_p(3.0, 2.0).unwrap().admissible);
        assert!(admissible_p(0.5, 2.0).is_err());
    }

    #[test]
    fn coefficient_norm() {
        assert_eq!(schatten_rhs(&[1.0], 2.0), 1.0);
        assert!((schatten_rhs(&[1.0, -2.0, 0.5], 1.0) - 3.5).abs() < 1e-15);
        let j = 7.0f64;
        let q = 1.7;
        let v = schatten_rhs(&[1.0; 7], q);
        assert!((v - j.powf((q + 1.0) / (2.0 * q))).abs() < 1e-13);
    }
}
