//! Analytic pieces of the Fredholm kernel for the double mixed model.
//!
//! The kernel K(u, s) = |u − s|^{γ−1} L(u, s) is assembled from a handful
//! of hypergeometric building blocks F₁…F₅ and singular integrals over them
//! (Φ, Ψ, Λ). Everything here is evaluated either directly or through
//! interpolation tables; see [`KernelOptions`].

mod hurst;
mod operator;
mod pieces;
mod surface;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use hurst::{HurstMode, HurstPair};
pub use operator::gamma_operator;
pub use pieces::{PhiPair, Triple};
pub use surface::Branch;

use crate::error::{domain, Error, Result};
use crate::quad::QuadSettings;
use crate::specfun::{beta_unchecked, gamma_real, HyperParams, InterpolationTable};

/// Node count of the F₁…F₅ lookup tables.
pub const DEFAULT_TABLE_SIZE: usize = 100_000;
/// Half-width of the diagonal band, relative to T, inside which L is
/// replaced by its limit ℓ.
pub const DEFAULT_EPS_DIAG: f64 = 1e-8;

/// Constants of the Fredholm equation and of the kernel factorisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// Multiplier of the integral operator.
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    /// Common diagonal limit of L.
    pub ell: f64,
    pub xi: f64,
    pub a_const: f64,
    pub b_const: f64,
    pub c_const: f64,
}

/// Relative tolerance of the A = (B + C)Ξ check in [`make_constants`].
pub const CONSTANT_CHECK_TOL: f64 = 1e-8;

/// Evaluates every closed-form constant for the pair `h`.
///
/// The diagonal limit is ℓ = CΞ. A second, independent route to the same
/// number (A = (B + C)Ξ) is evaluated as a self-check.
pub fn make_constants(h: &HurstPair) -> Result<KernelConstants> {
    let (h1, h2) = (h.h1(), h.h2());
    let alpha = h.alpha();
    let pi = std::f64::consts::PI;

    let c = gamma_real(2.0 - 2.0 * h1) * (pi * (1.0 - h1)).cos() * h2 * (2.0 * h2 - 1.0)
        / (pi * h1 * (2.0 * h1 - 1.0) * gamma_real(1.5 - h1).powi(2));

    let b_aa = beta_unchecked(1.5 - h1, 1.5 - h1);
    let b_ah = beta_unchecked(1.5 - h1, 2.0 * h2 - 1.0);
    let d1 = 2.0 * (1.0 - h1) * b_aa;
    let d2 = (1.0 - h2) * b_aa;
    let d3 = 2.0 * (h2 - h1) * b_ah;
    let d4 = (h1 - 0.5) * (1.5 - h1) / (2.0 * h2 - h1 + 0.5) * b_ah;
    let d5 = (h1 - 0.5) * b_ah;

    let params = hyper_params(h)?;
    let f2_one = params[1].value_at_one()?;
    let f5_one = params[4].value_at_one()?;

    let xi = (d3 + d5) - d5 * f5_one;
    let a_const = 2.0 * (h2 - h1) * d2 * f2_one * beta_unchecked(1.5 - h1, alpha);
    let b_const = (h1 - 0.5) * beta_unchecked(alpha, 1.0 + 2.0 * h1 - 2.0 * h2);
    let c_const = (1.5 + h1 - 2.0 * h2) * beta_unchecked(1.5 - h1, 1.0 + 2.0 * h1 - 2.0 * h2);
    let ell = c_const * xi;

    let consts = KernelConstants {
        c,
        d1,
        d2,
        d3,
        d4,
        d5,
        ell,
        xi,
        a_const,
        b_const,
        c_const,
    };
    let defect = consts.diagonal_defect();
    if !(defect <= CONSTANT_CHECK_TOL) {
        return Err(Error::Consistency(format!(
            "A = {a_const} but (B + C)Ξ = {} (relative defect {defect:.3e}) for {h}",
            (b_const + c_const) * xi
        )));
    }
    for (name, v) in [
        ("c", c),
        ("D1", d1),
        ("D2", d2),
        ("D3", d3),
        ("D4", d4),
        ("D5", d5),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Consistency(format!(
                "constant {name} = {v} is not positive for {h}"
            )));
        }
    }
    Ok(consts)
}

impl KernelConstants {
    /// |A − (B + C)Ξ| / |A|.
    pub fn diagonal_defect(&self) -> f64 {
        ((self.a_const - (self.b_const + self.c_const) * self.xi) / self.a_const).abs()
    }
}

/// Parameter triples of F₁…F₅ (F₃ and F₄ are evaluated at 1 − z).
pub fn hyper_params(h: &HurstPair) -> Result<[HyperParams; 5]> {
    let (h1, h2) = (h.h1(), h.h2());
    Ok([
        HyperParams::new(2.0 - 2.0 * h2, 1.5 - h1, 3.0 - 2.0 * h1)?,
        HyperParams::new(1.0 + 2.0 * h2 - 2.0 * h1, 1.5 - h1, 4.0 - 2.0 * h1)?,
        HyperParams::new(h1 - 0.5, 1.5 - h1, 2.0 * h2 - h1 + 0.5)?,
        HyperParams::new(
            2.0 * h2 - 2.0 * h1 + 1.0,
            2.0 * h2 - 1.0,
            2.0 * h2 - h1 + 1.5,
        )?,
        HyperParams::new(2.0 * h2 - 2.0 * h1, 2.0 * h2 - 1.0, 2.0 * h2 - h1 + 0.5)?,
    ])
}

/// The function g_T on (0, T): the solution of the single-fBm equation
/// Γ_{H₁} g = 1.
pub fn g_rhs(u: f64, h: &HurstPair, t_end: f64) -> Result<f64> {
    if !(t_end > 0.0) {
        return domain(format!("horizon T must be positive, got {t_end}"));
    }
    if !(u > 0.0 && u < t_end) {
        return domain(format!(
            "g_T is defined on the open interval (0, {t_end}), got u = {u}"
        ));
    }
    let h1 = h.h1();
    Ok((u * (t_end - u)).powf(0.5 - h1) / g_denominator(h1))
}

fn g_denominator(h1: f64) -> f64 {
    2.0 * h1 * beta_unchecked(1.5 - h1, h1 + 0.5)
}

/// How the hypergeometric building blocks are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Use interpolation tables for F₁…F₅ instead of direct series.
    pub use_tables: bool,
    pub table_size: usize,
    /// Half-width of the diagonal band relative to T.
    pub eps_diag: f64,
    pub quad: QuadSettings,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            use_tables: true,
            table_size: DEFAULT_TABLE_SIZE,
            eps_diag: DEFAULT_EPS_DIAG,
            quad: QuadSettings::with_tol(1e-10, 1e-10),
        }
    }
}

impl KernelOptions {
    /// Direct ₂F₁ evaluation everywhere; slower, used for validation.
    pub fn direct() -> Self {
        Self {
            use_tables: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
enum HyperEval {
    Direct(HyperParams),
    Table(Arc<InterpolationTable>),
}

impl HyperEval {
    #[inline]
    fn eval(&self, z: f64) -> f64 {
        match self {
            HyperEval::Direct(p) => p.eval(z.clamp(0.0, 1.0)).unwrap_or(f64::NAN),
            HyperEval::Table(t) => t.lookup(z),
        }
    }
}

/// Immutable bundle of everything needed to evaluate the kernel for one
/// Hurst pair and horizon.
#[derive(Debug, Clone)]
pub struct KernelModel {
    hurst: HurstPair,
    t_end: f64,
    consts: KernelConstants,
    params: [HyperParams; 5],
    hyper: [HyperEval; 5],
    options: KernelOptions,
    eps_diag: f64,
    /// Largest recorded table deviation, zero for direct evaluation.
    table_deviation: f64,
}

impl KernelModel {
    pub fn new(hurst: HurstPair, t_end: f64, options: KernelOptions) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return domain(format!(
                "horizon T must be positive and finite, got {t_end}"
            ));
        }
        if !(options.eps_diag > 0.0) {
            return domain(format!(
                "diagonal band width must be positive, got {}",
                options.eps_diag
            ));
        }
        let consts = make_constants(&hurst)?;
        let params = hyper_params(&hurst)?;
        let mut table_deviation = 0.0_f64;
        let hyper = if options.use_tables {
            let mut tables = Vec::with_capacity(5);
            for p in &params {
                let t = InterpolationTable::new(*p, options.table_size)?;
                table_deviation = table_deviation.max(t.max_deviation());
                tables.push(HyperEval::Table(Arc::new(t)));
            }
            tables.try_into().expect("five tables")
        } else {
            params.map(HyperEval::Direct)
        };
        Ok(Self {
            hurst,
            t_end,
            consts,
            params,
            hyper,
            options,
            eps_diag: options.eps_diag * t_end,
            table_deviation,
        })
    }

    /// Model with default options (table-backed).
    pub fn with_defaults(hurst: HurstPair, t_end: f64) -> Result<Self> {
        Self::new(hurst, t_end, KernelOptions::default())
    }

    /// Same model with different options, reusing nothing but the inputs.
    pub fn with_options(&self, options: KernelOptions) -> Result<Self> {
        Self::new(self.hurst, self.t_end, options)
    }

    pub fn hurst(&self) -> &HurstPair {
        &self.hurst
    }

    pub fn horizon(&self) -> f64 {
        self.t_end
    }

    pub fn constants(&self) -> &KernelConstants {
        &self.consts
    }

    pub fn options(&self) -> &KernelOptions {
        &self.options
    }

    pub fn eps_diag(&self) -> f64 {
        self.eps_diag
    }

    pub fn hyper_params(&self) -> &[HyperParams; 5] {
        &self.params
    }

    pub fn table_deviation(&self) -> f64 {
        self.table_deviation
    }

    /// g_T(u) for this model's H₁ and T.
    pub fn g(&self, u: f64) -> Result<f64> {
        g_rhs(u, &self.hurst, self.t_end)
    }

    /// Fₖ(z), k = 1..5, z ∈ [0, 1].
    #[inline]
    pub fn eval_f(&self, k: usize, z: f64) -> Result<f64> {
        if !(1..=5).contains(&k) {
            return domain(format!("F index must be 1..5, got {k}"));
        }
        if !(0.0..=1.0).contains(&z) {
            return domain(format!("F argument must lie in [0, 1], got {z}"));
        }
        let arg = if k == 3 || k == 4 { 1.0 - z } else { z };
        match &self.hyper[k - 1] {
            HyperEval::Table(t) => Ok(t.lookup(arg)),
            HyperEval::Direct(p) => p.eval(arg),
        }
    }

    /// Unchecked Fₖ(z); NaN signals an evaluation failure.
    #[inline]
    pub(crate) fn f(&self, k: usize, z: f64) -> f64 {
        match k {
            3 | 4 => self.hyper[k - 1].eval(1.0 - z),
            _ => self.hyper[k - 1].eval(z),
        }
    }
}
