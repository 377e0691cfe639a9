use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use dmfbm_core::fbm::SimulationMethod;
use dmfbm_core::{Error, Formulation, HurstMode, HurstPair, KernelOptions, Result, SolverConfig};
use serde::{Deserialize, Serialize};

/// Parameters shared by all subcommands. Every field is optional so that a
/// flag can be told apart from a default; unset flags fall back to the
/// config file and then to built-in defaults.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Hurst index of the rougher component, in (1/2, 3/4].
    #[arg(long)]
    pub h1: Option<f64>,
    /// Hurst index of the smoother component, in (H1, 1).
    #[arg(long)]
    pub h2: Option<f64>,
    /// Horizon T; montecarlo accepts a comma-separated list.
    #[arg(long = "T", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    #[serde(rename = "T")]
    pub t: Option<Vec<f64>>,
    /// Number of grid intervals.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n_intervals: Option<usize>,
    /// Kernel truncation parameter (defaults to N).
    #[arg(long = "n")]
    #[serde(rename = "n")]
    pub truncation: Option<usize>,
    /// Monte Carlo replications.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub replications: Option<usize>,
    /// Drift parameter of simulated paths.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; the JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub formulation: Option<Formulation>,
    /// Cap on worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Mesh resolution of kernel-surface.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub resolution: Option<usize>,
    /// Intervals of the simulation grid in montecarlo (defaults to N).
    #[arg(long = "path-N")]
    #[serde(rename = "path_N")]
    pub path_intervals: Option<usize>,
    #[arg(long)]
    pub method: Option<SimulationMethod>,
    /// Use interpolation tables for the hypergeometric factors.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub tables: Option<bool>,
    /// Accept H1 > 3/4.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub relaxed: Option<bool>,
    /// Integrate the diagonal cusp of the kernel exactly.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cusp_correction: Option<bool>,
    /// Multiplier on the kernel constant (0 turns the kernel off).
    #[arg(long)]
    pub kernel_scale: Option<f64>,
    /// Directory holding solved h_T for montecarlo.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

impl Params {
    /// Field-wise `self` over `other`.
    fn over(self, other: Params) -> Params {
        Params {
            h1: self.h1.or(other.h1),
            h2: self.h2.or(other.h2),
            t: self.t.or(other.t),
            n_intervals: self.n_intervals.or(other.n_intervals),
            truncation: self.truncation.or(other.truncation),
            replications: self.replications.or(other.replications),
            theta: self.theta.or(other.theta),
            seed: self.seed.or(other.seed),
            out: self.out.or(other.out),
            formulation: self.formulation.or(other.formulation),
            workers: self.workers.or(other.workers),
            resolution: self.resolution.or(other.resolution),
            path_intervals: self.path_intervals.or(other.path_intervals),
            method: self.method.or(other.method),
            tables: self.tables.or(other.tables),
            relaxed: self.relaxed.or(other.relaxed),
            cusp_correction: self.cusp_correction.or(other.cusp_correction),
            kernel_scale: self.kernel_scale.or(other.kernel_scale),
            cache: self.cache.or(other.cache),
        }
    }

    fn from_file(path: &Path) -> Result<Params> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

/// Fully resolved configuration, echoed into every sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub h1: f64,
    pub h2: f64,
    pub relaxed: bool,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[serde(rename = "N")]
    pub n_intervals: usize,
    #[serde(rename = "n")]
    pub truncation: usize,
    #[serde(rename = "M")]
    pub replications: usize,
    pub theta: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub formulation: Formulation,
    pub workers: Option<usize>,
    #[serde(rename = "R")]
    pub resolution: usize,
    #[serde(rename = "path_N")]
    pub path_intervals: Option<usize>,
    pub method: SimulationMethod,
    pub tables: bool,
    pub cusp_correction: bool,
    pub kernel_scale: f64,
    pub cache: PathBuf,
    #[serde(skip)]
    pub hurst: HurstPair,
}

impl RunConfig {
    /// Resolves flags over the optional config file over defaults and
    /// validates the result.
    pub fn resolve(command: &str, flags: Params, config: Option<&Path>) -> Result<RunConfig> {
        let file = match config {
            Some(p) => Params::from_file(p)?,
            None => Params::default(),
        };
        let p = flags.over(file);
        let relaxed = p.relaxed.unwrap_or(false);
        let mode = if relaxed {
            HurstMode::Relaxed
        } else {
            HurstMode::Strict
        };
        let hurst = HurstPair::new(p.h1.unwrap_or(0.6), p.h2.unwrap_or(0.7), mode)?;
        let t = p.t.unwrap_or_else(|| vec![1.0]);
        if t.is_empty() || t.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!("T must be positive, got {t:?}")));
        }
        if t.len() > 1 && command != "montecarlo" {
            return Err(Error::Domain(format!(
                "{command} takes a single T, got {t:?}"
            )));
        }
        let n_intervals = p.n_intervals.unwrap_or(500);
        let out = p
            .out
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.replace('-', "_"))));
        let cache = p.cache.unwrap_or_else(|| {
            out.parent()
                .unwrap_or_else(|| Path::new(""))
                .join("h_cache")
        });
        let cfg = RunConfig {
            command: command.to_string(),
            h1: hurst.h1(),
            h2: hurst.h2(),
            relaxed,
            t,
            n_intervals,
            truncation: p.truncation.unwrap_or(n_intervals),
            replications: p.replications.unwrap_or(1000),
            theta: p.theta.unwrap_or(1.0),
            seed: p.seed.unwrap_or(0),
            out,
            formulation: p.formulation.unwrap_or_default(),
            workers: p.workers,
            resolution: p.resolution.unwrap_or(101),
            path_intervals: p.path_intervals,
            method: p.method.unwrap_or_default(),
            tables: p.tables.unwrap_or(true),
            cusp_correction: p.cusp_correction.unwrap_or(true),
            kernel_scale: p.kernel_scale.unwrap_or(1.0),
            cache,
            hurst,
        };
        cfg.solver().validate()?;
        if cfg.workers == Some(0) {
            return Err(Error::Domain("--workers must be at least 1".into()));
        }
        if cfg.resolution < 2 {
            return Err(Error::Domain(format!(
                "R must be at least 2, got {}",
                cfg.resolution
            )));
        }
        if !cfg.theta.is_finite() {
            return Err(Error::Domain(format!(
                "theta must be finite, got {}",
                cfg.theta
            )));
        }
        Ok(cfg)
    }

    pub fn horizon(&self) -> f64 {
        self.t[0]
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            n_intervals: self.n_intervals,
            truncation: Some(self.truncation),
            formulation: self.formulation,
            allow_relaxed: self.relaxed,
            cusp_correction: self.cusp_correction,
            kernel_scale: self.kernel_scale,
            ..SolverConfig::default()
        }
    }

    pub fn kernel(&self) -> KernelOptions {
        if self.tables {
            KernelOptions::default()
        } else {
            KernelOptions::direct()
        }
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
