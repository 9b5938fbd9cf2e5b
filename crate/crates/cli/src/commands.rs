use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dunkl_core::config::HarnessConfig;
use dunkl_core::free::lens_relation_residual;
use dunkl_core::hartree::{approximate_identity, solve_hartree, HartreeConfig, Interaction};
use dunkl_core::hermite::{hermite_functions_1d, kernel_kit, mehler_closed_form};
use dunkl_core::hls::{mhls_check, symmetric_exponents, LineProfile};
use dunkl_core::operators::{dual_functional, kss_check, kss_check_reduced};
use dunkl_core::quadrature::TimeRule;
use dunkl_core::report::{self, Summary};
use dunkl_core::strichartz::{
    admissible_p, duhamel_constant_source, duhamel_trajectory, inhomogeneous_check, q_grid, run_inequality, sweep,
    CoefficientMode, InequalityParams, SystemKind,
};
use dunkl_core::{DunklError, DunklStructure, HermiteBasis, OperatorMatrix, Profile, Propagator, StateVector};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_OK: u8 = 0;
const EXIT_RUNTIME: u8 = 1;
const EXIT_IDENTITY: u8 = 2;
const EXIT_CONFIG: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "dunkl-strichartz", version, about = "Dunkl-Hermite kernel, Schatten and Strichartz checks")]
struct Cli {
    /// Key/value (TOML) configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Comma-separated multiplicities, one per coordinate or one for all.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    kappa: Option<Vec<f64>>,
    /// Reflection group `Z2^d` (or just `d`).
    #[arg(long, global = true)]
    group: Option<String>,
    /// Truncation degree per coordinate.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    time_nodes: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lens relation, kernel symmetries and the generating function.
    VerifyKernels,
    /// One evaluation of the orthonormal Strichartz inequality.
    Strichartz(StrichartzArgs),
    /// Schatten norm of the dual time-averaged operator.
    DualSchatten(DualArgs),
    /// Inhomogeneous estimate with a Duhamel closed-form check.
    Inhomogeneous(InhomArgs),
    /// Schatten bound for f(ax+bp) g(cx+dp).
    Kss(KssArgs),
    /// Multilinear Hardy-Littlewood-Sobolev integral and its dilation covariance.
    Mhls(MhlsArgs),
    /// Ratio sweep over q, J and the configured seeds.
    Sweep(SweepArgs),
    /// Picard iteration for the Hartree equation.
    Hartree(HartreeArgs),
}

#[derive(Args, Debug, Clone)]
struct SystemArgs {
    #[arg(long, default_value = "hermite")]
    propagator: String,
    #[arg(long, default_value = "haar_rotation")]
    system: String,
    #[arg(long, default_value = "random_positive")]
    coefficients: String,
}

#[derive(Args, Debug)]
struct StrichartzArgs {
    /// Time exponent; `q` follows from the admissible line when omitted.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "J", default_value_t = 8)]
    j: usize,
    /// Defaults to the first configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Args, Debug)]
struct DualArgs {
    /// Spatial dual exponent; defaults to the admissible corner `1 + d_eff/2`.
    #[arg(long)]
    qprime: Option<f64>,
    #[arg(long, default_value = "hermite")]
    propagator: String,
}

#[derive(Args, Debug)]
struct InhomArgs {
    #[arg(long, default_value_t = 1.5)]
    q: f64,
    #[arg(long, default_value_t = 3)]
    rank: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct KssArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
}

#[derive(Args, Debug)]
struct MhlsArgs {
    /// Number of factors (2 or 3).
    #[arg(long, default_value_t = 2)]
    factors: usize,
    #[arg(long, default_value_t = 1.6)]
    r: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 24)]
    nodes: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    q_min: f64,
    #[arg(long, default_value_t = 1.8)]
    q_max: f64,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    /// Comma-separated system sizes.
    #[arg(long = "J", value_delimiter = ',', default_value = "1,2,4,8,16")]
    js: Vec<usize>,
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Args, Debug)]
struct HartreeArgs {
    /// `convolution` or `multiplication`.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    coupling: Option<f64>,
    /// Horizon `T`.
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<DunklError> for Failure {
    fn from(e: DunklError) -> Self {
        match e {
            DunklError::Config(_) | DunklError::InvalidExponent(_) | DunklError::InvalidMultiplicity(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Summary, Failure>;

pub fn run(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(m) => {
            eprintln!("config error: {m}");
            return EXIT_CONFIG;
        }
    };
    let out = match &cli.command {
        Command::VerifyKernels => verify_kernels(&cfg),
        Command::Strichartz(a) => strichartz(&cfg, a),
        Command::DualSchatten(a) => dual(&cfg, a),
        Command::Inhomogeneous(a) => inhomogeneous(&cfg, a),
        Command::Kss(a) => kss(&cfg, a),
        Command::Mhls(a) => mhls(&cfg, a),
        Command::Sweep(a) => run_sweep(&cfg, a),
        Command::Hartree(a) => hartree(&cfg, a),
    };
    match out {
        Ok(summary) => {
            let name = summary.command.replace('-', "_");
            let path = cfg.output.join(format!("{name}_summary.json"));
            if let Err(e) = summary.write(&path) {
                eprintln!("error: {e}");
                return EXIT_RUNTIME;
            }
            for c in &summary.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("summary: {}", path.display());
            if summary.all_passed {
                EXIT_OK
            } else {
                EXIT_IDENTITY
            }
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}

fn load_config(cli: &Cli) -> Result<HarnessConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => HarnessConfig::load(p).map_err(|e| e.to_string())?,
        None => HarnessConfig::new(vec![0.5], 24).map_err(|e| e.to_string())?,
    };
    if let Some(g) = &cli.group {
        let d = g
            .trim()
            .trim_start_matches(|c: char| c.is_ascii_alphabetic())
            .trim_start_matches('2')
            .trim_start_matches('^');
        let d = if g.trim().chars().all(|c| c.is_ascii_digit()) { g.trim() } else { d };
        cfg.d = d.parse().map_err(|_| format!("group {g:?} (expected Z2^d)"))?;
    }
    if let Some(k) = &cli.kappa {
        cfg.kappa = k.clone();
        if cli.group.is_none() && cli.config.is_none() {
            cfg.d = k.len();
        }
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(t) = cli.time_nodes {
        cfg.time_nodes = t;
    }
    if let Some(o) = &cli.output {
        cfg.output = o.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn structure(cfg: &HarnessConfig) -> Result<DunklStructure, Failure> {
    Ok(DunklStructure::new(cfg.kappa_vec())?)
}

fn basis(cfg: &HarnessConfig) -> Result<HermiteBasis, Failure> {
    Ok(cfg.run_config(cfg.seeds[0]).basis()?)
}

fn parse<T: std::str::FromStr<Err = DunklError>>(s: &str) -> Result<T, Failure> {
    s.parse::<T>().map_err(|e| Failure::Config(e.to_string()))
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    parameter: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

fn write_rows(path: &Path, rows: &[CheckRow]) -> Result<(), Failure> {
    let run = || -> dunkl_core::Result<()> {
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    };
    Ok(run()?)
}

fn lattice(d: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let lat = [-1.5, -0.75, 0.0, 0.75, 1.5];
    let mut out = Vec::new();
    for &a in &lat {
        for &b in &lat {
            let x: Vec<f64> = (0..d).map(|j| a * (1.0 - 0.3 * j as f64) + 0.2 * j as f64).collect();
            let y: Vec<f64> = (0..d).map(|j| b * (1.0 + 0.25 * j as f64) - 0.1 * j as f64).collect();
            out.push((x, y));
        }
    }
    out
}

fn verify_kernels(cfg: &HarnessConfig) -> Outcome {
    let s = structure(cfg)?;
    let mut rows = Vec::new();
    let mut push = |check: &str, parameter: String, value: f64, tolerance: f64| {
        rows.push(CheckRow {
            check: check.into(),
            parameter,
            value,
            tolerance,
            passed: value <= tolerance,
        });
    };
    for v in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let t = 0.5 * f64::atan(v);
        let (mut lens, mut conj) = (0.0f64, 0.0f64);
        for (x, y) in lattice(s.d()) {
            let k = kernel_kit(&s, t, &x, &y)?;
            lens = lens.max(lens_relation_residual(&s, v, &x, &y)? / k.norm());
            conj = conj.max((kernel_kit(&s, -t, &x, &y)? - k.conj()).norm() / k.norm());
        }
        push("lens_relation", format!("v={v}"), lens, 1e-10);
        push("time_reversal", format!("v={v}"), conj, 1e-12);
    }
    // the generating function factorizes over coordinates
    for w in [0.3, 0.5, 0.7] {
        let mut worst = 0.0f64;
        for &k in s.kappa() {
            let s1 = DunklStructure::new(vec![k])?;
            for (x, y) in lattice(1) {
                let c = mehler_closed_form(&s1, Complex64::new(w, 0.0), &x, &y)?;
                let px = hermite_functions_1d(k, 120, x[0]);
                let py = hermite_functions_1d(k, 120, y[0]);
                let series: f64 = (0..=120).map(|m| px[m] * py[m] * w.powi(m as i32)).sum();
                worst = worst.max((c - series).norm() / c.norm());
            }
        }
        push("generating_function", format!("w={w},N=120"), worst, 1e-10);
    }
    write_rows(&cfg.output.join("verify_kernels.csv"), &rows)?;
    let mut summary = Summary::new("verify-kernels", cfg);
    for r in &rows {
        summary.push(&format!("{} {}", r.check, r.parameter), r.passed, r.value);
    }
    Ok(summary)
}

fn resolve_q(p: Option<f64>, q: Option<f64>, d_eff: f64) -> Result<f64, Failure> {
    match (p, q) {
        (None, None) => Ok(1.5),
        (None, Some(q)) => Ok(q),
        (Some(p), q) => {
            if !(p >= 1.0) {
                return Err(Failure::Config(format!("p = {p}")));
            }
            let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let denom = d_eff - 2.0 * inv;
            if denom <= 0.0 {
                return Err(Failure::Config(format!("p = {p} has no q >= 1 on the admissible line")));
            }
            let from_p = d_eff / denom;
            match q {
                Some(q) if (q - from_p).abs() > 1e-9 * from_p => Err(Failure::Config(format!(
                    "p = {p} and q = {q} are not on the line 2/p + d_eff/q = d_eff (q would be {from_p})"
                ))),
                _ => Ok(from_p),
            }
        }
    }
}

fn template(a: &SystemArgs) -> Result<InequalityParams, Failure> {
    Ok(InequalityParams {
        propagator: parse::<Propagator>(&a.propagator)?,
        system: parse::<SystemKind>(&a.system)?,
        coefficients: parse::<CoefficientMode>(&a.coefficients)?,
        q: 1.0,
        j: 1,
        seed: 0,
    })
}

fn strichartz(cfg: &HarnessConfig, a: &StrichartzArgs) -> Outcome {
    let b = basis(cfg)?;
    let d_eff = b.structure().d_eff();
    let q = resolve_q(a.p, a.q, d_eff)?;
    admissible_p(q, d_eff)?;
    let seed = a.seed.unwrap_or(cfg.seeds[0]);
    let params = InequalityParams {
        q,
        j: a.j,
        seed,
        ..template(&a.system)?
    };
    let rep = run_inequality(&cfg.run_config(seed), &b, &params)?;
    report::write_csv(&cfg.output.join("strichartz.csv"), std::slice::from_ref(&rep))?;
    let mut summary = Summary::new("strichartz", cfg);
    summary.push("ratio finite", rep.ratio.is_finite(), &rep);
    if q == 1.0 {
        summary.push("q=1 triangle bound", rep.ratio <= 1.0 + 1e-8, rep.ratio);
    }
    Ok(summary)
}

fn run_sweep(cfg: &HarnessConfig, a: &SweepArgs) -> Outcome {
    if a.steps == 0 || !(a.q_min >= 1.0) || a.q_max < a.q_min {
        return Err(Failure::Config("need 1 <= q-min <= q-max and steps >= 1".into()));
    }
    let b = basis(cfg)?;
    let qs = q_grid(a.q_min, a.q_max, a.steps);
    let reports = sweep(&cfg.run_config(cfg.seeds[0]), &b, &template(&a.system)?, &qs, &a.js, &cfg.seeds)?;
    report::write_csv(&cfg.output.join("sweep.csv"), &reports)?;
    report::write_ratio_curves(&cfg.output, "sweep_ratio", &reports)?;
    let mut summary = Summary::new("sweep", cfg);
    let env = dunkl_core::strichartz::ratio_envelopes(&reports);
    summary.push("ratios finite", reports.iter().all(|r| r.ratio.is_finite()), &env);
    let q1: Vec<f64> = reports.iter().filter(|r| r.q == 1.0).map(|r| r.ratio).collect();
    if !q1.is_empty() {
        let worst = q1.iter().fold(0.0f64, |m, r| m.max(*r));
        summary.push("q=1 triangle bound", worst <= 1.0 + 1e-8, worst);
    }
    Ok(summary)
}

fn dual(cfg: &HarnessConfig, a: &DualArgs) -> Outcome {
    let b = basis(cfg)?;
    let p = parse::<Propagator>(&a.propagator)?;
    let d_eff = b.structure().d_eff();
    let qprime = a.qprime.unwrap_or(1.0 + d_eff / 2.0);
    let (rule, fine) = match p {
        Propagator::Hermite => (
            TimeRule::periodic(-PI, PI, cfg.time_nodes),
            TimeRule::periodic(-PI, PI, 2 * cfg.time_nodes),
        ),
        Propagator::Laplacian => (
            TimeRule::composite_gauss_legendre(-6.0, 6.0, 16, 16),
            TimeRule::composite_gauss_legendre(-6.0, 6.0, 32, 16),
        ),
    };
    let v = move |t: f64, x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match p {
            Propagator::Hermite => (-r2).exp() * (1.0 + 0.5 * t.cos()),
            Propagator::Laplacian => (-r2 - t * t).exp(),
        }
    };
    let inf = dual_functional(&b, &v, p, &rule, f64::INFINITY)?;
    let val = dual_functional(&b, &v, p, &rule, qprime)?;
    let val2 = dual_functional(&b, &v, p, &fine, qprime)?;
    let mut summary = Summary::new("dual-schatten", cfg);
    summary.push(
        "operator norm <= int ||V||_inf",
        inf.value <= inf.l1_linf * (1.0 + 1e-8),
        (inf.value, inf.l1_linf),
    );
    let gap = (val.value - val2.value).abs() / val2.value;
    summary.push(
        "time-grid doubling",
        val.value.is_finite() && gap < 1e-4,
        serde_json::json!({ "qprime": qprime, "value": val.value, "doubled": val2.value, "gap": gap }),
    );
    Ok(summary)
}

fn random_state(b: &HermiteBasis, rng: &mut ChaCha8Rng) -> StateVector {
    let half = b.degree() / 2;
    let c = DVector::from_fn(b.len(), |i, _| {
        if b.multi_indices()[i].iter().sum::<usize>() <= half {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let n = c.norm();
    StateVector::new(b.clone(), c.unscale(n)).expect("coefficients match the basis")
}

fn inhomogeneous(cfg: &HarnessConfig, a: &InhomArgs) -> Outcome {
    if a.rank == 0 {
        return Err(Failure::Config("rank must be positive".into()));
    }
    let b = basis(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(cfg.seeds[0]));
    let f = random_state(&b, &mut rng);
    let r1 = OperatorMatrix::rank_one(&f, &f);
    let time = TimeRule::periodic(-PI, PI, 64);
    let traj = duhamel_trajectory(&|_| r1.clone(), &b, &time, -PI, 16)?;
    let gap = traj
        .iter()
        .zip(&time.nodes)
        .map(|(g, &t)| {
            let e = duhamel_constant_source(&r1, t, -PI);
            (g.matrix() - e.matrix()).norm() / e.frobenius_norm()
        })
        .fold(0.0f64, f64::max);
    let fs: Vec<StateVector> = (0..a.rank).map(|_| random_state(&b, &mut rng)).collect();
    let bb = b.clone();
    let source = move |t: f64| {
        fs.iter().enumerate().fold(OperatorMatrix::zeros(&bb), |acc, (k, f)| {
            let c = 1.0 + 0.5 * ((k + 1) as f64 * t).sin();
            acc.add(&OperatorMatrix::rank_one(f, f).scale(Complex64::new(c, 0.0)))
        })
    };
    let res = inhomogeneous_check(&source, &b, a.q, cfg.time_nodes.min(256), 8)?;
    let mut summary = Summary::new("inhomogeneous", cfg);
    summary.push("rank-1 Duhamel closed form", gap < 1e-8, gap);
    summary.push("ratio finite", res.ratio.is_finite(), &res);
    Ok(summary)
}

fn kss(cfg: &HarnessConfig, a: &KssArgs) -> Outcome {
    let s = structure(cfg)?;
    let f = Profile::gaussian(1.0, 1.0);
    let mut summary = Summary::new("kss", cfg);
    if s.d() == 1 {
        let res = kss_check_reduced(&s, &f, &f, a.alpha, a.beta, a.gamma, a.delta, a.r)?;
        summary.push("bound (reduced route)", res.ratio <= 1.0 + 1e-8, &res);
    }
    let b = basis(cfg)?;
    let spec = kss_check(&b, &f, &f, a.alpha, a.beta, a.gamma, a.delta, a.r)?;
    // truncated product: reported, not asserted
    summary.checks.push(report::CheckOutcome {
        name: "spectral route (truncated, informational)".into(),
        passed: true,
        detail: serde_json::to_value(spec).unwrap_or_default(),
    });
    Ok(summary)
}

fn mhls(cfg: &HarnessConfig, a: &MhlsArgs) -> Outcome {
    if !(a.factors == 2 || a.factors == 3) {
        return Err(Failure::Config(format!("factors = {} (2 or 3)", a.factors)));
    }
    if !(a.lambda > 0.0) {
        return Err(Failure::Config(format!("lambda = {}", a.lambda)));
    }
    let (beta, rs) = symmetric_exponents(a.factors, a.r);
    let fs: Vec<LineProfile> = [
        LineProfile::new(0.0, 1.0, |t| 1.0 + t),
        LineProfile::new(0.0, 1.0, |t| 0.5 + (1.0 - t).powi(2)),
        LineProfile::new(0.0, 1.0, |t| (PI * t).cos() + 1.5),
    ]
    .into_iter()
    .take(a.factors)
    .collect::<dunkl_core::Result<_>>()?;
    let base = mhls_check(&fs, &beta, &rs, a.nodes)?;
    let dil: Vec<LineProfile> = fs.iter().map(|p| p.dilate(a.lambda)).collect();
    let scaled = mhls_check(&dil, &beta, &rs, a.nodes)?;
    let n = a.factors as f64;
    let sum_beta = n * (n - 1.0) / 2.0 * beta[0][1];
    let defect = (scaled.lhs / base.lhs / a.lambda.powf(-n + sum_beta) - 1.0).abs();
    let mut summary = Summary::new("mhls", cfg);
    summary.push("finite", base.ratio.is_finite(), &base);
    summary.push("dilation covariance", defect < 1e-6, defect);
    Ok(summary)
}

#[derive(Serialize)]
struct HartreeRow {
    iteration: usize,
    residual: f64,
    contraction: Option<f64>,
    trace_drift: f64,
    self_adjoint_defect: f64,
    schatten_sup: f64,
}

fn hartree(cfg: &HarnessConfig, a: &HartreeArgs) -> Outcome {
    let mut h = cfg.hartree.clone();
    if let Some(p) = &a.profile {
        h.profile = p.clone();
    }
    h.width = a.width.unwrap_or(h.width);
    h.coupling = a.coupling.unwrap_or(h.coupling);
    h.horizon = a.horizon.unwrap_or(h.horizon);
    h.steps = a.steps.unwrap_or(h.steps);
    let mut effective = cfg.clone();
    effective.hartree = h.clone();
    effective.validate()?;
    let b = basis(cfg)?;
    if b.structure().d() != 1 {
        return Err(Failure::Config("hartree runs need d = 1".into()));
    }
    if h.occupations.len() > b.len() {
        return Err(Failure::Config("more occupations than basis states".into()));
    }
    let gamma0 = h.occupations.iter().enumerate().fold(OperatorMatrix::zeros(&b), |acc, (k, &occ)| {
        let f = StateVector::basis_function(&b, k);
        acc.add(&OperatorMatrix::rank_one(&f, &f).scale(Complex64::new(occ, 0.0)))
    });
    let kappa = b.structure().kappa()[0];
    let interaction = match h.profile.as_str() {
        "convolution" => Interaction::DunklConvolution {
            w: approximate_identity(kappa, h.width),
            coupling: h.coupling,
        },
        _ => Interaction::Multiplication {
            potential: Profile::gaussian(1.0, 1.0 / (h.width * h.width)),
            coupling: h.coupling,
        },
    };
    let hc = HartreeConfig::new(gamma0, h.horizon, h.steps, interaction, h.q)?;
    let sol = solve_hartree(&hc)?;
    let rows: Vec<HartreeRow> = sol
        .diagnostics
        .iter()
        .map(|d| HartreeRow {
            iteration: d.iteration,
            residual: d.residual,
            contraction: d.contraction,
            trace_drift: d.trace_drift,
            self_adjoint_defect: d.self_adjoint_defect,
            schatten_sup: d.schatten_sup,
        })
        .collect();
    let path = effective.output.join("hartree.csv");
    let write = || -> dunkl_core::Result<()> {
        std::fs::create_dir_all(&effective.output)?;
        let mut w = csv::Writer::from_path(&path)?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    };
    write()?;
    let mut summary = Summary::new("hartree", &effective);
    summary.push("trace conservation", sol.trace_drift() < 1e-8, sol.trace_drift());
    let defect = sol.diagnostics.iter().fold(0.0f64, |m, d| m.max(d.self_adjoint_defect));
    summary.push("self-adjointness", defect < 1e-10, defect);
    summary.checks.push(report::CheckOutcome {
        name: "convergence (informational)".into(),
        passed: true,
        detail: serde_json::json!({
            "converged": sol.converged,
            "iterations": sol.iterations(),
            "max_contraction": sol.max_contraction(),
        }),
    });
    Ok(summary)
}
