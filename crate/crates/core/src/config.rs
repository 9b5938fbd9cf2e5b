//! Key/value run configuration shared by the CLI and the Python module.
//!
//! ```toml
//! d = 1
//! kappa = [0.5]
//! n = 48
//! time_nodes = 512
//! seeds = [1, 2, 3, 4, 5]
//! output = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::strichartz::{RunConfig, TimeWindow};

fn default_time_nodes() -> usize {
    512
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_window() -> TimeWindow {
    TimeWindow::Full
}

fn default_width() -> f64 {
    0.5
}

fn default_horizon() -> f64 {
    0.1
}

fn default_steps() -> usize {
    20
}

fn default_hartree_q() -> f64 {
    1.5
}

/// Parameters of the `hartree` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartreeSection {
    /// `convolution` or `multiplication`.
    #[serde(default = "HartreeSection::default_profile")]
    pub profile: String,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_hartree_q")]
    pub q: f64,
    /// Occupations of the lowest basis states in the initial state.
    #[serde(default = "HartreeSection::default_occupations")]
    pub occupations: Vec<f64>,
}

impl HartreeSection {
    fn default_profile() -> String {
        "convolution".into()
    }

    fn default_occupations() -> Vec<f64> {
        vec![0.3, 0.2]
    }
}

impl Default for HartreeSection {
    fn default() -> Self {
        Self {
            profile: Self::default_profile(),
            width: default_width(),
            coupling: 0.0,
            horizon: default_horizon(),
            steps: default_steps(),
            q: default_hartree_q(),
            occupations: Self::default_occupations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub d: usize,
    /// One multiplicity per coordinate, or a single value used for all.
    pub kappa: Vec<f64>,
    /// Truncation degree per coordinate.
    pub n: usize,
    /// Spatial rule order; defaults to `2 (n + 1)`.
    #[serde(default)]
    pub grid_order: Option<usize>,
    #[serde(default = "default_time_nodes")]
    pub time_nodes: usize,
    #[serde(default = "default_window")]
    pub window: TimeWindow,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub hartree: HartreeSection,
}

impl HarnessConfig {
    /// Defaults for a given structure.
    pub fn new(kappa: Vec<f64>, n: usize) -> Result<Self> {
        let cfg = Self {
            d: kappa.len(),
            kappa,
            n,
            grid_order: None,
            time_nodes: default_time_nodes(),
            window: default_window(),
            seeds: default_seeds(),
            output: default_output(),
            hartree: HartreeSection::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| DunklError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DunklError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DunklError::Config(m));
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if self.kappa.len() != 1 && self.kappa.len() != self.d {
            return bad(format!("kappa has {} entries for d = {}", self.kappa.len(), self.d));
        }
        if let Some(k) = self.kappa.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return bad(format!("kappa entry {k} must be finite and >= 0"));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.grid_order() < self.n + 1 {
            return bad(format!("grid_order {} below n + 1 = {}", self.grid_order(), self.n + 1));
        }
        if self.time_nodes < 2 {
            return bad("time_nodes must be at least 2".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        let h = &self.hartree;
        if !(h.horizon > 0.0 && h.horizon <= 1.0) || h.steps == 0 || !(h.width > 0.0) || !(h.q >= 1.0) {
            return bad("hartree: need 0 < horizon <= 1, steps > 0, width > 0, q >= 1".into());
        }
        if !matches!(h.profile.as_str(), "convolution" | "multiplication") {
            return bad(format!("hartree profile {:?}", h.profile));
        }
        Ok(())
    }

    pub fn kappa_vec(&self) -> Vec<f64> {
        if self.kappa.len() == self.d {
            self.kappa.clone()
        } else {
            vec![self.kappa[0]; self.d]
        }
    }

    pub fn grid_order(&self) -> usize {
        self.grid_order.unwrap_or(2 * (self.n + 1))
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            kappa: self.kappa_vec(),
            n: self.n,
            grid_order: self.grid_order(),
            time_nodes: self.time_nodes,
            window: self.window,
            seed,
        }
    }

    /// TOML text that parses back to `self`.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let cfg = HarnessConfig::parse("d = 2\nkappa = [1.0, 0.5]\nn = 6\n").unwrap();
        assert_eq!(cfg.grid_order(), 14);
        assert_eq!(HarnessConfig::parse(&cfg.echo()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "d = 1\nkappa = [0.5, 1.0, 2.0]\nn = 4\n",
            "d = 1\nkappa = [-1.0]\nn = 4\n",
            "d = 1\nkappa = [0.5]\nn = 4\ngrid_order = 3\n",
            "d = 1\nkappa = [0.5]\nn = 4\nbogus = 1\n",
            "d = 1\nkappa = 0.5\n",
        ] {
            assert!(matches!(HarnessConfig::parse(text), Err(DunklError::Config(_))), "{text}");
        }
    }
}
