//! CSV, JSON and plot-data writers for Strichartz sweeps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::HarnessConfig;
use crate::error::Result;
use crate::strichartz::{admissible_p, StrichartzReport};

/// Flat CSV row: config echo, exponent pair and report fields.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub d: usize,
    pub kappa: String,
    pub n: usize,
    pub grid_order: usize,
    pub time_nodes: usize,
    pub window: String,
    pub config_seed: u64,
    pub propagator: String,
    pub system: String,
    pub coefficients: String,
    pub seed: u64,
    pub j: usize,
    pub q: f64,
    pub p: f64,
    pub d_eff: f64,
    pub admissible: bool,
    pub scaling_defect: f64,
    pub coefficient_exponent: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub wall_time_s: f64,
}

impl From<&StrichartzReport> for CsvRow {
    fn from(r: &StrichartzReport) -> Self {
        let pair = admissible_p(r.q, r.d_eff).expect("report holds a valid q");
        let kappa: Vec<String> = r.config.kappa.iter().map(|k| k.to_string()).collect();
        Self {
            d: r.config.kappa.len(),
            kappa: kappa.join(";"),
            n: r.config.n,
            grid_order: r.config.grid_order,
            time_nodes: r.config.time_nodes,
            window: serde_json::to_value(r.config.window)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            config_seed: r.config.seed,
            propagator: r.propagator.to_string(),
            system: r.system.to_string(),
            coefficients: r.coefficients.to_string(),
            seed: r.seed,
            j: r.j,
            q: r.q,
            p: r.p,
            d_eff: r.d_eff,
            admissible: r.admissible,
            scaling_defect: pair.scaling_defect(),
            coefficient_exponent: pair.coefficient_exponent(),
            lhs: r.lhs,
            rhs: r.rhs,
            ratio: r.ratio,
            wall_time_s: r.wall_time_s,
        }
    }
}

pub fn write_csv(path: &Path, reports: &[StrichartzReport]) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    for r in reports {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// One named check in a summary.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

/// JSON document written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub config: HarnessConfig,
    pub config_echo: String,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

impl Summary {
    pub fn new(command: &str, config: &HarnessConfig) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            config_echo: config.echo(),
            checks: Vec::new(),
            all_passed: true,
        }
    }

    pub fn push(&mut self, name: &str, passed: bool, detail: impl Serialize) {
        self.all_passed &= passed;
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed,
            detail: serde_json::to_value(detail).unwrap_or(serde_json::Value::Null),
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        ensure_parent(path)?;
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Whitespace-separated two-column file with a `#` header.
pub fn write_columns(path: &Path, header: (&str, &str), rows: &[(f64, f64)]) -> Result<()> {
    ensure_parent(path)?;
    let mut f = fs::File::create(path)?;
    writeln!(f, "# {} {}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(f, "{x:.10e} {y:.10e}")?;
    }
    Ok(())
}

/// Writes `<stem>_max.dat` and `<stem>_min.dat` with the ratio envelope against `q`.
pub fn write_ratio_curves(dir: &Path, stem: &str, reports: &[StrichartzReport]) -> Result<Vec<PathBuf>> {
    let env = crate::strichartz::ratio_envelopes(reports);
    let max: Vec<(f64, f64)> = env.iter().map(|e| (e.q, e.max)).collect();
    let min: Vec<(f64, f64)> = env.iter().map(|e| (e.q, e.min)).collect();
    let pmax = dir.join(format!("{stem}_max.dat"));
    let pmin = dir.join(format!("{stem}_min.dat"));
    write_columns(&pmax, ("q", "max_ratio"), &max)?;
    write_columns(&pmin, ("q", "min_ratio"), &min)?;
    Ok(vec![pmax, pmin])
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(p) = path.parent() {
        if !p.as_os_str().is_empty() {
            fs::create_dir_all(p)?;
        }
    }
    Ok(())
}
