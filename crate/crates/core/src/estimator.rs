//! The estimator θ̂_T = ∫h dX / ∫h ds on discrete data, and Monte Carlo
//! campaigns around it.

use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::fbm::{MixedGenerator, MixedPath, RngSpec, SimulationMethod};
use crate::fredholm::{solve_mle_h, DiscreteSolution, Grid, SolverConfig};
use crate::kernel::{HurstPair, KernelModel, KernelOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub theta_hat: f64,
    /// ∫₀ᵀ h dt.
    pub int_h: f64,
    /// 1/∫₀ᵀ h dt.
    pub theoretical_variance: f64,
}

/// Quadrature for the denominator ∫h ds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DenominatorRule {
    #[default]
    Trapezoid,
    /// Σ h(t_j)δ over j < N, matching the left-point numerator.
    LeftPoint,
}

/// θ̂ from values of h on the path's own grid.
pub fn estimate_from_values(
    h: &[f64],
    path: &MixedPath,
    rule: DenominatorRule,
) -> Result<EstimationResult> {
    let x = &path.values;
    if h.len() != x.len() {
        return Err(Error::GridMismatch(format!(
            "h has {} values, path has {}",
            h.len(),
            x.len()
        )));
    }
    let delta = path.grid.step();
    let numerator: f64 = h
        .iter()
        .zip(x.windows(2))
        .map(|(hj, w)| hj * (w[1] - w[0]))
        .sum();
    let n = h.len() - 1;
    let int_h = match rule {
        DenominatorRule::Trapezoid => delta * (h[1..n].iter().sum::<f64>() + 0.5 * (h[0] + h[n])),
        DenominatorRule::LeftPoint => delta * h[..n].iter().sum::<f64>(),
    };
    if !(int_h.is_finite() && int_h.abs() > f64::MIN_POSITIVE) {
        return Err(Error::ZeroDenominator(format!("∫h = {int_h}")));
    }
    Ok(EstimationResult {
        theta_hat: numerator / int_h,
        int_h,
        theoretical_variance: 1.0 / int_h,
    })
}

/// θ̂ for a solved h and a path on the same grid. A path on a finer grid
/// whose interval count is a multiple of the solution's is restricted first.
pub fn estimate_theta(h: &DiscreteSolution, path: &MixedPath) -> Result<EstimationResult> {
    let path = if path.grid.intervals() == h.grid.intervals() {
        if (path.grid.horizon() - h.grid.horizon()).abs() > 1e-12 * h.grid.horizon() {
            return Err(Error::GridMismatch(format!(
                "h lives on [0, {}], the path on [0, {}]",
                h.grid.horizon(),
                path.grid.horizon()
            )));
        }
        path.clone()
    } else {
        path.restrict(&h.grid)?
    };
    estimate_from_values(&h.values, &path, DenominatorRule::Trapezoid)
}

/// On-disk store of solved h_T, keyed by Hurst pair, horizon and solver
/// configuration.
#[derive(Debug, Clone)]
pub struct HCache {
    dir: PathBuf,
}

impl HCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, hurst: &HurstPair, t_end: f64, cfg: &SolverConfig) -> PathBuf {
        let mut name = format!(
            "h_{}_{}_T{}_N{}_n{}_{}",
            hurst.h1(),
            hurst.h2(),
            t_end,
            cfg.n_intervals,
            cfg.truncation(),
            cfg.formulation
        );
        if !cfg.cusp_correction {
            name.push_str("_plain");
        }
        if cfg.kernel_scale != 1.0 {
            name.push_str(&format!("_c{}", cfg.kernel_scale));
        }
        self.dir.join(name + ".json")
    }

    pub fn load(
        &self,
        hurst: &HurstPair,
        t_end: f64,
        cfg: &SolverConfig,
    ) -> Result<Option<DiscreteSolution>> {
        let path = self.path_for(hurst, t_end, cfg);
        if !path.exists() {
            return Ok(None);
        }
        let sol: DiscreteSolution =
            serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
        Ok(Some(sol))
    }

    pub fn store(&self, sol: &DiscreteSolution) -> Result<()> {
        let path = self.path_for(&sol.hurst, sol.grid.horizon(), &sol.config);
        let tmp = path.with_extension("json.tmp");
        serde_json::to_writer(BufWriter::new(File::create(&tmp)?), sol)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

/// Solves for h_T, going through `cache` when given.
pub fn solve_cached(
    hurst: &HurstPair,
    t_end: f64,
    cfg: &SolverConfig,
    options: KernelOptions,
    cache: Option<&HCache>,
) -> Result<DiscreteSolution> {
    if let Some(c) = cache {
        if let Some(sol) = c.load(hurst, t_end, cfg)? {
            log::info!("h_T loaded from cache for {hurst}, T = {t_end}");
            return Ok(sol);
        }
    }
    let model = KernelModel::new(*hurst, t_end, options)?;
    let sol = solve_mle_h(&model, cfg)?;
    if let Some(c) = cache {
        c.store(&sol)?;
    }
    Ok(sol)
}

/// Parameters of a Monte Carlo campaign for one (H₁, H₂, T) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub hurst: HurstPair,
    pub t_end: f64,
    pub replications: usize,
    pub solver: SolverConfig,
    /// Intervals of the path grid; defaults to the solver grid. A different
    /// value interpolates h linearly onto the path grid.
    pub path_intervals: Option<usize>,
    pub theta: f64,
    pub base_seed: u64,
    pub method: SimulationMethod,
    pub kernel: KernelOptions,
}

impl MonteCarloConfig {
    pub fn new(
        hurst: HurstPair,
        t_end: f64,
        replications: usize,
        n_intervals: usize,
        theta: f64,
        base_seed: u64,
    ) -> Self {
        Self {
            hurst,
            t_end,
            replications,
            solver: SolverConfig::new(n_intervals),
            path_intervals: None,
            theta,
            base_seed,
            method: SimulationMethod::Circulant,
            kernel: KernelOptions::default(),
        }
    }

    pub fn path_intervals(&self) -> usize {
        self.path_intervals.unwrap_or(self.solver.n_intervals)
    }

    fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return domain(format!(
                "need at least 2 replications, got {}",
                self.replications
            ));
        }
        if !self.theta.is_finite() {
            return domain(format!("drift must be finite, got {}", self.theta));
        }
        self.solver.validate()
    }
}

/// Outcome of one Monte Carlo cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub h1: f64,
    pub h2: f64,
    pub t_end: f64,
    pub replications: usize,
    pub solver_intervals: usize,
    pub path_intervals: usize,
    pub theta: f64,
    pub mean: f64,
    /// Unbiased sample variance of θ̂.
    pub empirical_variance: f64,
    pub theoretical_variance: f64,
    /// √(empirical variance / M).
    pub std_error: f64,
    pub base_seed: u64,
    /// Replication r used stream r of `base_seed`.
    pub first_stream: u64,
    pub method: SimulationMethod,
    pub solve_seconds: f64,
    pub simulate_seconds: f64,
}

impl MonteCarloSummary {
    /// Two-sided chi-square band for the sample variance of M i.i.d.
    /// normals with the theoretical variance.
    pub fn variance_band(&self, level: f64) -> Result<(f64, f64)> {
        variance_band(self.theoretical_variance, self.replications, level)
    }

    /// Appends this summary to a CSV file, writing the header if the file
    /// is new or empty.
    pub fn append_csv(&self, path: &Path) -> Result<()> {
        let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(file);
        w.serialize(self)?;
        w.flush()?;
        Ok(())
    }
}

/// [σ²χ²_{(1−level)/2}/(M−1), σ²χ²_{(1+level)/2}/(M−1)] with M − 1 degrees
/// of freedom.
pub fn variance_band(sigma2: f64, m: usize, level: f64) -> Result<(f64, f64)> {
    if m < 2 || !(level > 0.0 && level < 1.0) {
        return domain(format!(
            "variance band needs M ≥ 2 and level in (0, 1), got M = {m}, level = {level}"
        ));
    }
    let dof = (m - 1) as f64;
    let chi = ChiSquared::new(dof).map_err(|e| Error::Domain(e.to_string()))?;
    let lo = chi.inverse_cdf(0.5 * (1.0 - level));
    let hi = chi.inverse_cdf(0.5 * (1.0 + level));
    Ok((sigma2 * lo / dof, sigma2 * hi / dof))
}

/// Solves h_T once, simulates M paths on disjoint streams and summarises
/// θ̂. Deterministic given the configuration.
pub fn run_montecarlo(cfg: &MonteCarloConfig, cache: Option<&HCache>) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let sol = solve_cached(&cfg.hurst, cfg.t_end, &cfg.solver, cfg.kernel, cache)?;
    let solve_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let path_grid = Grid::new(cfg.t_end, cfg.path_intervals())?;
    let h = sol.resample(&path_grid)?;
    let generator = MixedGenerator::new(cfg.hurst, path_grid, cfg.method)?;
    let estimates: Vec<f64> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| {
            let path = generator.sample(cfg.theta, &RngSpec::new(cfg.base_seed, r));
            estimate_from_values(&h, &path, DenominatorRule::Trapezoid).map(|e| e.theta_hat)
        })
        .collect::<Result<_>>()?;
    let simulate_seconds = start.elapsed().as_secs_f64();

    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(MonteCarloSummary {
        h1: cfg.hurst.h1(),
        h2: cfg.hurst.h2(),
        t_end: cfg.t_end,
        replications: cfg.replications,
        solver_intervals: cfg.solver.n_intervals,
        path_intervals: cfg.path_intervals(),
        theta: cfg.theta,
        mean,
        empirical_variance: var,
        theoretical_variance: 1.0 / sol.integral(),
        std_error: (var / m).sqrt(),
        base_seed: cfg.base_seed,
        first_stream: 0,
        method: generator.method(),
        solve_seconds,
        simulate_seconds,
    })
}
