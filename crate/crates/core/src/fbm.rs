//! Exact simulation of fractional Brownian motion and of the mixed path
//! X_t = θt + B^{H₁}_t + B^{H₂}_t on a uniform grid.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fredholm::Grid;
use crate::kernel::HurstPair;

/// Seed plus stream id of a ChaCha8 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Substream `k` of this stream; distinct (stream, k) give distinct
    /// generator streams as long as k < 2³².
    pub fn substream(&self, k: u32) -> Self {
        Self {
            seed: self.seed,
            stream: (self.stream << 32) | k as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SimulationMethod {
    /// Circulant embedding, falling back to Cholesky if the embedding has
    /// negative eigenvalues.
    #[default]
    Circulant,
    Cholesky,
}

impl fmt::Display for SimulationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimulationMethod::Circulant => "circulant",
            SimulationMethod::Cholesky => "cholesky",
        })
    }
}

impl FromStr for SimulationMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circulant" => Ok(SimulationMethod::Circulant),
            "cholesky" => Ok(SimulationMethod::Cholesky),
            other => domain(format!(
                "unknown simulation method `{other}` (expected circulant or cholesky)"
            )),
        }
    }
}

/// Relative size of a negative circulant eigenvalue still treated as
/// rounding noise.
const EMBEDDING_TOL: f64 = 1e-10;

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
fn fgn_autocov(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

enum Factor {
    /// √(λ_k / M) of the 2m-point circulant embedding.
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    },
    /// Lower Cholesky factor of the path covariance at t_1..t_N.
    Cholesky(DMatrix<f64>),
}

/// Reusable sampler for one Hurst index and grid.
pub struct FbmGenerator {
    hurst: f64,
    grid: Grid,
    method: SimulationMethod,
    factor: Factor,
}

impl FbmGenerator {
    pub fn new(hurst: f64, grid: Grid, method: SimulationMethod) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
        }
        if method == SimulationMethod::Circulant {
            if let Some(factor) = circulant_factor(hurst, grid.intervals()) {
                return Ok(Self {
                    hurst,
                    grid,
                    method,
                    factor,
                });
            }
            log::warn!(
                "circulant embedding failed for H = {hurst}, N = {}; using Cholesky",
                grid.intervals()
            );
        }
        let factor = cholesky_factor(hurst, &grid)?;
        Ok(Self {
            hurst,
            grid,
            method: SimulationMethod::Cholesky,
            factor,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The method actually in use after any fallback.
    pub fn method(&self) -> SimulationMethod {
        self.method
    }

    /// One path B_{t_0}, …, B_{t_N} with B_{t_0} = 0.
    pub fn sample(&self, rng: &RngSpec) -> Vec<f64> {
        let mut r = rng.rng();
        let n = self.grid.intervals();
        let mut path = Vec::with_capacity(n + 1);
        path.push(0.0);
        match &self.factor {
            Factor::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex<f64>> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut r);
                        let im: f64 = StandardNormal.sample(&mut r);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                let scale = self.grid.step().powf(self.hurst);
                let mut acc = 0.0;
                for z in &buf[..n] {
                    acc += scale * z.re;
                    path.push(acc);
                }
            }
            Factor::Cholesky(l) => {
                let xi = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut r));
                path.extend((l * xi).iter());
            }
        }
        path
    }
}

/// The circulant square-root eigenvalues for N increments, or `None` if the
/// embedding is not nonnegative definite.
fn circulant_factor(h: f64, n: usize) -> Option<Factor> {
    let m = n.next_power_of_two();
    let size = 2 * m;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|k| Complex::new(fgn_autocov(h, if k <= m { k } else { size - k }), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut row);
    let max = row.iter().fold(0.0_f64, |a, z| a.max(z.re));
    let mut sqrt_eig = Vec::with_capacity(size);
    for z in &row {
        if z.re < -EMBEDDING_TOL * max {
            return None;
        }
        sqrt_eig.push((z.re.max(0.0) / size as f64).sqrt());
    }
    Some(Factor::Circulant { sqrt_eig, fft })
}

fn cholesky_factor(h: f64, grid: &Grid) -> Result<Factor> {
    let n = grid.intervals();
    let t: Vec<f64> = (1..=n).map(|j| grid.node(j)).collect();
    let e = 2.0 * h;
    let cov = DMatrix::from_fn(n, n, |i, j| {
        0.5 * (t[i].powf(e) + t[j].powf(e) - (t[i] - t[j]).abs().powf(e))
    });
    cov.cholesky()
        .map(|c| Factor::Cholesky(c.l()))
        .ok_or_else(|| {
            Error::Embedding(format!(
                "circulant embedding and Cholesky both failed for H = {h}, N = {n}"
            ))
        })
}

/// One fractional Brownian path on the grid, B_0 = 0.
pub fn fbm_sample(hurst: f64, grid: &Grid, rng: &RngSpec) -> Result<Vec<f64>> {
    Ok(FbmGenerator::new(hurst, *grid, SimulationMethod::Circulant)?.sample(rng))
}

/// A sampled path of X_t = θt + B^{H₁}_t + B^{H₂}_t.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixedPath {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub theta: f64,
    pub hurst: HurstPair,
    pub rng: RngSpec,
    pub method: SimulationMethod,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathMetadata {
    pub theta: f64,
    pub h1: f64,
    pub h2: f64,
    pub t_end: f64,
    pub n_intervals: usize,
    pub seed: u64,
    pub stream: u64,
    pub method: SimulationMethod,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
}

impl MixedPath {
    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    /// The path at every `k`-th node of its grid, where `grid` has N/k
    /// intervals over the same horizon.
    pub fn restrict(&self, grid: &Grid) -> Result<MixedPath> {
        let (n, m) = (self.grid.intervals(), grid.intervals());
        let same_horizon =
            (grid.horizon() - self.grid.horizon()).abs() <= 1e-12 * self.grid.horizon();
        if !same_horizon || m > n || n % m != 0 {
            return Err(Error::GridMismatch(format!(
                "cannot restrict a path with N = {n} on [0, {}] to N = {m} on [0, {}]",
                self.grid.horizon(),
                grid.horizon()
            )));
        }
        let k = n / m;
        Ok(MixedPath {
            grid: *grid,
            values: self.values.iter().step_by(k).copied().collect(),
            ..self.clone()
        })
    }

    pub fn metadata(&self) -> PathMetadata {
        PathMetadata {
            theta: self.theta,
            h1: self.hurst.h1(),
            h2: self.hurst.h2(),
            t_end: self.grid.horizon(),
            n_intervals: self.grid.intervals(),
            seed: self.rng.seed,
            stream: self.rng.stream,
            method: self.method,
            config: serde_json::Value::Null,
        }
    }

    /// Writes columns `t,X`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "X"])?;
        for (t, x) in self.grid.nodes().into_iter().zip(&self.values) {
            w.serialize((t, x))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the CSV and a `.json` sidecar next to it.
    pub fn save(&self, csv_path: &Path, config: serde_json::Value) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(csv_path)?))?;
        let mut meta = self.metadata();
        meta.config = config;
        serde_json::to_writer_pretty(
            BufWriter::new(File::create(csv_path.with_extension("json"))?),
            &meta,
        )?;
        Ok(())
    }
}

/// Generators for both components of the mixed path on one grid.
pub struct MixedGenerator {
    hurst: HurstPair,
    first: FbmGenerator,
    second: FbmGenerator,
}

impl MixedGenerator {
    pub fn new(hurst: HurstPair, grid: Grid, method: SimulationMethod) -> Result<Self> {
        Ok(Self {
            hurst,
            first: FbmGenerator::new(hurst.h1(), grid, method)?,
            second: FbmGenerator::new(hurst.h2(), grid, method)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.first.grid()
    }

    /// Cholesky if either component fell back to it.
    pub fn method(&self) -> SimulationMethod {
        if self.first.method() == SimulationMethod::Cholesky
            || self.second.method() == SimulationMethod::Cholesky
        {
            SimulationMethod::Cholesky
        } else {
            SimulationMethod::Circulant
        }
    }

    /// The components use substreams 0 and 1 of `rng`.
    pub fn sample(&self, theta: f64, rng: &RngSpec) -> MixedPath {
        let b1 = self.first.sample(&rng.substream(0));
        let b2 = self.second.sample(&rng.substream(1));
        let grid = *self.grid();
        let values = grid
            .nodes()
            .iter()
            .zip(b1.iter().zip(&b2))
            .map(|(t, (x, y))| theta * t + x + y)
            .collect();
        MixedPath {
            grid,
            values,
            theta,
            hurst: self.hurst,
            rng: *rng,
            method: self.method(),
        }
    }
}

/// One path of X_t = θt + B^{H₁}_t + B^{H₂}_t with independent components.
pub fn mixed_path(theta: f64, hurst: &HurstPair, grid: &Grid, rng: &RngSpec) -> Result<MixedPath> {
    if !theta.is_finite() {
        return domain(format!("drift must be finite, got {theta}"));
    }
    Ok(MixedGenerator::new(*hurst, *grid, SimulationMethod::Circulant)?.sample(theta, rng))
}
