//! Correction for the diagonal cusp of L.
//!
//! Near the diagonal L(u, s) = ℓ + c±(u)|u − s|^{1−γ} + a±(u)|u − s| + …,
//! so the piecewise-linear interpolant of L(t_i, ·) misses the cusp by O(δ)
//! and the plain product-integration scheme is only first order. The
//! correction adds, per row and side, ĉ± times the exact-minus-discrete
//! integral of the basis function b_i(s) = |t_i − s⁽ⁿ⁾|^{1−γ} against each
//! hat function, with ĉ± fitted from the two nearest off-diagonal entries.
//! The basis uses the clamped s⁽ⁿ⁾ so it stays flat where L⁽ⁿ⁾ does.

use super::weights::WeightTable;
use crate::error::Result;
use crate::quad::{integrate, QuadSettings};

/// ∫_a^b φ_j for the hat function φ_j of the grid t_k = kδ, k = 0..=n.
fn hat_integral(j: usize, n: usize, delta: f64, a: f64, b: f64) -> f64 {
    let tj = j as f64 * delta;
    let mut total = 0.0;
    if j > 0 {
        let (lo, hi) = (a.max(tj - delta), b.min(tj));
        if hi > lo {
            // φ rises linearly from 0 at t_{j−1} to 1 at t_j.
            let f = |s: f64| (s - (tj - delta)) / delta;
            total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
        }
    }
    if j < n {
        let (lo, hi) = (a.max(tj), b.min(tj + delta));
        if hi > lo {
            let f = |s: f64| ((tj + delta) - s) / delta;
            total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
        }
    }
    total
}

fn hat_value(j: usize, delta: f64, s: f64) -> f64 {
    (1.0 - (s - j as f64 * delta).abs() / delta).max(0.0)
}

pub(crate) struct CuspContext<'a> {
    pub n: usize,
    pub delta: f64,
    pub t_end: f64,
    pub gamma: f64,
    pub ell: f64,
    pub lo: f64,
    pub hi: f64,
    pub weights: &'a WeightTable,
    pub quad: QuadSettings,
}

impl CuspContext<'_> {
    /// Adds the correction for row `i` to `row`, which holds
    /// L⁽ⁿ⁾(t_i, t_j)(ψ¹ + ψ²) on entry; `l` holds the unweighted L⁽ⁿ⁾(t_i, t_j).
    /// Rows whose node lies in a clamped zone are left alone.
    pub fn apply(&self, i: usize, l: &[f64], row: &mut [f64]) -> Result<()> {
        let ti = i as f64 * self.delta;
        if !(ti >= self.lo && ti <= self.hi) {
            return Ok(());
        }
        let p = 1.0 - self.gamma;
        let node = |j: usize| {
            if j >= self.n {
                self.t_end
            } else {
                j as f64 * self.delta
            }
        };
        let b = |s: f64| (ti - s.clamp(self.lo, self.hi)).abs().powf(p);
        for side in [-1i64, 1] {
            let c = self.fit(i, side, l);
            if c == 0.0 {
                continue;
            }
            let (a, e) = if side < 0 {
                (0.0, ti)
            } else {
                (ti, self.t_end)
            };
            let range = if side < 0 { 0..=i } else { i..=self.n };
            for j in range {
                let exact = self.basis_integral(j, ti, a, e, &b)?;
                let discrete = if j == i {
                    0.0
                } else {
                    self.weights.combined(j, i) * b(node(j))
                };
                row[j] += c * (exact - discrete);
            }
        }
        Ok(())
    }

    /// Fits ĉ from ℓ + ĉx^{1−γ} + âx through the two nearest nodes on one
    /// side; one node gives the cusp term alone, none gives zero.
    fn fit(&self, i: usize, side: i64, l: &[f64]) -> f64 {
        let p = 1.0 - self.gamma;
        let ti = i as f64 * self.delta;
        let at = |k: i64| -> Option<(f64, f64)> {
            let j = i as i64 + side * k;
            if j < 0 || j > self.n as i64 {
                return None;
            }
            let j = j as usize;
            let s = if j >= self.n {
                self.t_end
            } else {
                j as f64 * self.delta
            };
            let x = (ti - s.clamp(self.lo, self.hi)).abs();
            (x > 0.0).then(|| (x, l[j] - self.ell))
        };
        match (at(1), at(2)) {
            (Some((x1, y1)), Some((x2, y2))) if x2 > x1 * (1.0 + 1e-12) => {
                (y1 * x2 - y2 * x1) / (x1.powf(p) * x2 - x2.powf(p) * x1)
            }
            (Some((x1, y1)), _) => y1 / x1.powf(p),
            _ => 0.0,
        }
    }

    /// ∫ over [a, e] of |t_i − s|^{γ−1}b_i(s)φ_j(s): the integrand is φ_j
    /// where s is unclamped and is evaluated by quadrature on clamped zones.
    fn basis_integral(
        &self,
        j: usize,
        ti: f64,
        a: f64,
        e: f64,
        b: &dyn Fn(f64) -> f64,
    ) -> Result<f64> {
        let d = self.delta;
        let (s0, s1) = ((j as f64 - 1.0) * d, (j as f64 + 1.0) * d);
        let (a, e) = (a.max(s0), e.min(s1));
        if e <= a {
            return Ok(0.0);
        }
        let mut total = hat_integral(j, self.n, d, a.max(self.lo), e.min(self.hi));
        for (za, ze) in [(a, e.min(self.lo)), (a.max(self.hi), e)] {
            if ze > za {
                let g = self.gamma;
                let v = integrate(
                    |s| (ti - s).abs().powf(g - 1.0) * b(s) * hat_value(j, d, s),
                    za,
                    ze,
                    &self.quad,
                )?;
                total += v.value;
            }
        }
        Ok(total)
    }
}
