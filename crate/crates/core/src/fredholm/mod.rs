//! Product-integration discretisation of
//!
//! ```text
//! h(u) + c∫₀ᵀ |u − s|^{γ−1} L(u, s) h(s) ds = g(u)
//! ```
//!
//! on a uniform grid, and the dense linear solve of the resulting system
//! (I + cK)H = G with K_{ij} = L⁽ⁿ⁾(t_i, t_j)(ψ¹_{j,i} + ψ²_{j,i}).

mod cusp;
mod io;
mod weights;

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cusp::CuspContext;
pub use io::SolutionMetadata;
pub use weights::{weight_psi1, weight_psi2, WeightTable};

use crate::error::{domain, Error, Result};
use crate::kernel::{HurstMode, HurstPair, KernelModel};
use crate::quad::{integrate, integrate_graded_dist, Estimate, QuadSettings};

/// Uniform grid t_j = jT/N, j = 0..=N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    t_end: f64,
    n: usize,
}

impl Grid {
    pub fn new(t_end: f64, n: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return domain(format!("grid horizon must be positive, got {t_end}"));
        }
        if n < 2 {
            return domain(format!("grid needs at least 2 intervals, got {n}"));
        }
        Ok(Self { t_end, n })
    }

    pub fn horizon(&self) -> f64 {
        self.t_end
    }

    /// Number of intervals N.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of nodes N + 1.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j >= self.n {
            self.t_end
        } else {
            j as f64 * self.t_end / self.n as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }
}

/// Which form of the equation is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// The equation for h with right-hand side g_T.
    #[default]
    Direct,
    /// The equation for h̃ = h·[u(T−u)]^{H₁−1/2}, whose right-hand side is
    /// constant.
    Tilde,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Direct => "direct",
            Formulation::Tilde => "tilde",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Formulation::Direct),
            "tilde" => Ok(Formulation::Tilde),
            other => domain(format!(
                "unknown formulation `{other}` (expected direct or tilde)"
            )),
        }
    }
}

/// Discretisation and solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of grid intervals N.
    pub n_intervals: usize,
    /// Truncation parameter n of L⁽ⁿ⁾; defaults to N.
    pub truncation: Option<usize>,
    pub formulation: Formulation,
    /// Smallest acceptable |U_kk| / max|U_kk| of the LU factors.
    pub pivot_tol: f64,
    /// Permit Hurst pairs outside the strict range in [`solve_mle_h`].
    pub allow_relaxed: bool,
    /// Integrate the leading |u − s|^{1−γ} term of L exactly instead of
    /// through its linear interpolant, raising the order of the scheme.
    #[serde(default = "default_true")]
    pub cusp_correction: bool,
    /// Multiplier on the kernel constant c; 1 for the equation itself, 0
    /// reduces it to h = g.
    #[serde(default = "default_scale")]
    pub kernel_scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_intervals: 500,
            truncation: None,
            formulation: Formulation::Direct,
            pivot_tol: 1e-13,
            allow_relaxed: false,
            cusp_correction: true,
            kernel_scale: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn new(n_intervals: usize) -> Self {
        Self {
            n_intervals,
            ..Self::default()
        }
    }

    pub fn with_formulation(mut self, f: Formulation) -> Self {
        self.formulation = f;
        self
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn with_cusp_correction(mut self, on: bool) -> Self {
        self.cusp_correction = on;
        self
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(self.n_intervals)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_intervals < 2 {
            return domain(format!("N must be at least 2, got {}", self.n_intervals));
        }
        if self.truncation() < 2 {
            return domain(format!(
                "truncation n must be at least 2, got {}",
                self.truncation()
            ));
        }
        if !self.kernel_scale.is_finite() {
            return domain(format!(
                "kernel scale must be finite, got {}",
                self.kernel_scale
            ));
        }
        if !(self.pivot_tol >= 0.0) {
            return domain(format!(
                "pivot tolerance must be nonnegative, got {}",
                self.pivot_tol
            ));
        }
        Ok(())
    }
}

/// Solved values on the grid plus diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub hurst: HurstPair,
    pub config: SolverConfig,
    /// ‖(I + cK)H − G‖∞ of the solved system.
    pub residual_norm: f64,
    /// ‖G‖∞.
    pub rhs_norm: f64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

impl DiscreteSolution {
    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    /// ∫₀ᵀ h by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        let v = &self.values;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        self.grid.step() * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    }

    /// Piecewise-linear interpolant at t ∈ [0, T].
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.grid.intervals();
        let x = (t / self.grid.step()).clamp(0.0, n as f64);
        let j = (x.floor() as usize).min(n - 1);
        let w = x - j as f64;
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// Values of the interpolant on another grid over the same horizon.
    pub fn resample(&self, grid: &Grid) -> Result<Vec<f64>> {
        if (grid.horizon() - self.grid.horizon()).abs() > 1e-12 * self.grid.horizon() {
            return Err(Error::GridMismatch(format!(
                "cannot resample a solution on [0, {}] to [0, {}]",
                self.grid.horizon(),
                grid.horizon()
            )));
        }
        if grid.intervals() == self.grid.intervals() {
            return Ok(self.values.clone());
        }
        Ok(grid
            .nodes()
            .into_iter()
            .map(|t| self.interpolate(t))
            .collect())
    }

    /// Whether the direct solve met ‖residual‖ ≤ 10⁻¹⁰‖G‖.
    pub fn residual_ok(&self) -> bool {
        self.residual_norm <= 1e-10 * self.rhs_norm
    }
}

/// An assembled and factorised system for one model and configuration.
pub struct Solver<'a> {
    model: &'a KernelModel,
    config: SolverConfig,
    grid: Grid,
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Clamped nodes used for L and for the right-hand side.
    clamped: Vec<f64>,
    assembly_seconds: f64,
}

impl<'a> Solver<'a> {
    /// Assembles I + cK and factorises it.
    pub fn new(model: &'a KernelModel, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let start = Instant::now();
        let grid = Grid::new(model.horizon(), config.n_intervals)?;
        let matrix = assemble(model, &config)?;
        let clamped = clamped_nodes(model, &grid, config.truncation())?;
        let lu = matrix.clone().lu();
        check_pivots(&lu, config.pivot_tol)?;
        Ok(Self {
            model,
            config,
            grid,
            matrix,
            lu,
            clamped,
            assembly_seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Nodes after clamping into [1/n, T − 1/n].
    pub fn clamped_nodes(&self) -> &[f64] {
        &self.clamped
    }

    /// Solves for h given the right-hand side of the direct equation at the
    /// grid nodes. In the tilde formulation the data are transformed before
    /// and after the solve.
    pub fn solve_rhs(&self, rhs: &[f64]) -> Result<DiscreteSolution> {
        if rhs.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "right-hand side has {} entries, grid has {} nodes",
                rhs.len(),
                self.grid.len()
            )));
        }
        let start = Instant::now();
        let weight: Vec<f64> = match self.config.formulation {
            Formulation::Direct => vec![1.0; rhs.len()],
            Formulation::Tilde => self
                .clamped
                .iter()
                .map(|&u| self.model.tilde_weight(u))
                .collect(),
        };
        let g = DVector::from_iterator(rhs.len(), rhs.iter().zip(&weight).map(|(r, w)| r * w));
        let x = self
            .lu
            .solve(&g)
            .ok_or_else(|| Error::Singular("LU solve failed on the assembled system".into()))?;
        let residual = (&self.matrix * &x - &g).amax();
        let values = x.iter().zip(&weight).map(|(v, w)| v / w).collect();
        Ok(DiscreteSolution {
            grid: self.grid,
            values,
            hurst: *self.model.hurst(),
            config: self.config,
            residual_norm: residual,
            rhs_norm: g.amax(),
            assembly_seconds: self.assembly_seconds,
            solve_seconds: start.elapsed().as_secs_f64(),
        })
    }

    /// Right-hand side g_T at the clamped nodes.
    pub fn mle_rhs(&self) -> Result<Vec<f64>> {
        self.clamped.iter().map(|&u| self.model.g(u)).collect()
    }
}

fn clamped_nodes(model: &KernelModel, grid: &Grid, n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = model.clamp_bounds(n)?;
    Ok(grid.nodes().into_iter().map(|t| t.clamp(lo, hi)).collect())
}

fn check_pivots(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, tol: f64) -> Result<()> {
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(max > 0.0) || !(min > tol * max) || !min.is_finite() {
        return Err(Error::Singular(format!(
            "pivot ratio {:.3e} below threshold {tol:.1e}; the Hurst pair may be invalid or N too small",
            min / max
        )));
    }
    Ok(())
}

/// Assembles I + cK for the configured formulation.
pub fn assemble(model: &KernelModel, cfg: &SolverConfig) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    let grid = Grid::new(model.horizon(), cfg.n_intervals)?;
    let n = grid.intervals();
    let size = grid.len();
    let clamped = clamped_nodes(model, &grid, cfg.truncation())?;
    let weights = WeightTable::new(n, model.horizon(), model.hurst().gamma());
    let c = cfg.kernel_scale * model.constants().c;
    let tilde: Option<Vec<f64>> = match cfg.formulation {
        Formulation::Direct => None,
        Formulation::Tilde => Some(clamped.iter().map(|&u| model.tilde_weight(u)).collect()),
    };

    let (lo, hi) = model.clamp_bounds(cfg.truncation())?;
    let cusp = CuspContext {
        n,
        delta: grid.step(),
        t_end: model.horizon(),
        gamma: model.hurst().gamma(),
        ell: model.constants().ell,
        lo,
        hi,
        weights: &weights,
        quad: model.options().quad,
    };

    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            let l: Vec<f64> = clamped
                .iter()
                .map(|&s| model.eval_l(clamped[i], s))
                .collect::<Result<_>>()?;
            let mut row: Vec<f64> = l
                .iter()
                .enumerate()
                .map(|(j, lij)| lij * weights.combined(j, i))
                .collect();
            if cfg.cusp_correction {
                cusp.apply(i, &l, &mut row)?;
            }
            for (j, entry) in row.iter_mut().enumerate() {
                *entry *= c;
                if let Some(w) = &tilde {
                    *entry *= w[i] / w[j];
                }
            }
            row[i] += 1.0;
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(size, size, |i, j| rows[i][j]))
}

/// Solves the equation for the MLE weight function h_T.
pub fn solve_mle_h(model: &KernelModel, cfg: &SolverConfig) -> Result<DiscreteSolution> {
    if model.hurst().mode() == HurstMode::Relaxed && !cfg.allow_relaxed && model.hurst().h1() > 0.75
    {
        return domain(format!(
            "H1 = {} is outside (1/2, 3/4]; set allow_relaxed to solve anyway",
            model.hurst().h1()
        ));
    }
    let solver = Solver::new(model, *cfg)?;
    let rhs = solver.mle_rhs()?;
    solver.solve_rhs(&rhs)
}

/// Right-hand side g(t_i) = h(t_i) + c∫₀ᵀ |t_i − s|^{γ−1}L⁽ⁿ⁾(t_i, s)h(s) ds
/// for a prescribed exact solution h, by adaptive quadrature.
pub fn manufactured_rhs<F>(
    model: &KernelModel,
    h_exact: F,
    cfg: &SolverConfig,
    quad: &QuadSettings,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    cfg.validate()?;
    let grid = Grid::new(model.horizon(), cfg.n_intervals)?;
    let (lo, hi) = model.clamp_bounds(cfg.truncation())?;
    let t_end = model.horizon();
    let gamma = model.hurst().gamma();
    let c = cfg.kernel_scale * model.constants().c;
    let q = (1.0 / gamma).max(1.0);

    grid.nodes()
        .into_par_iter()
        .map(|u| {
            if c == 0.0 {
                return Ok(h_exact(u));
            }
            let uc = u.clamp(lo, hi);
            let failure = RefCell::new(None);
            let integrand = |s: f64, d: f64| match model.eval_l(uc, s.clamp(lo, hi)) {
                Ok(l) => d.powf(gamma - 1.0) * l * h_exact(s),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let mut total = 0.0;
            // Pieces on either side of u, broken at the clamp points where
            // L⁽ⁿ⁾ has kinks.
            let mut left_breaks: Vec<f64> = vec![0.0];
            if lo < u {
                left_breaks.push(lo);
            }
            if hi < u {
                left_breaks.push(hi);
            }
            left_breaks.push(u);
            for w in left_breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let last = b == u;
                let est = if last {
                    integrate_graded_dist(|s, _, d| integrand(s, d), a, b, 1.0, q, quad)
                } else {
                    integrate(|s| integrand(s, u - s), a, b, quad)
                };
                total += absorb(est, &failure)?;
            }
            let mut right_breaks: Vec<f64> = vec![u];
            if lo > u {
                right_breaks.push(lo);
            }
            if hi > u {
                right_breaks.push(hi);
            }
            right_breaks.push(t_end);
            for w in right_breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let first = a == u;
                let est = if first {
                    integrate_graded_dist(|s, d, _| integrand(s, d), a, b, q, 1.0, quad)
                } else {
                    integrate(|s| integrand(s, s - u), a, b, quad)
                };
                total += absorb(est, &failure)?;
            }
            Ok(h_exact(u) + c * total)
        })
        .collect()
}

fn absorb(est: Result<Estimate>, failure: &RefCell<Option<Error>>) -> Result<f64> {
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    Ok(est?.value)
}

/// (Γ_{H₁} + Γ_{H₂})h at the grid nodes for the piecewise-linear
/// interpolant of a discrete solution, using exact product integration.
pub fn operator_defect(sol: &DiscreteSolution) -> Vec<f64> {
    let grid = sol.grid;
    let n = grid.intervals();
    let tables: Vec<(f64, WeightTable)> = [sol.hurst.h1(), sol.hurst.h2()]
        .iter()
        .map(|&h| {
            (
                h * (2.0 * h - 1.0),
                WeightTable::new(n, grid.horizon(), 2.0 * h - 1.0),
            )
        })
        .collect();
    (0..=n)
        .map(|i| {
            tables
                .iter()
                .map(|(pref, w)| {
                    pref * (0..=n)
                        .map(|j| w.combined(j, i) * sol.values[j])
                        .sum::<f64>()
                })
                .sum()
        })
        .collect()
}
