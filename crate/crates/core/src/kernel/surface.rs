//! The kernel factor L(u, s), the kernel K(u, s) = |u − s|^{γ−1}L(u, s)
//! and their truncated and transformed variants.

use super::KernelModel;
use crate::error::{domain, Result};

/// Which formula produced a value of L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// 0 < s < u < T.
    Lower,
    /// 0 < u < s < T.
    Upper,
    /// |u − s| within the diagonal band.
    Diagonal,
}

impl KernelModel {
    fn check_open(&self, u: f64, s: f64) -> Result<()> {
        let t = self.t_end;
        if !(u > 0.0 && u < t && s > 0.0 && s < t) {
            return domain(format!(
                "kernel arguments must lie in (0, {t})², got ({u}, {s})"
            ));
        }
        Ok(())
    }

    /// L(u, s) on (0, T)², with the diagonal band replaced by ℓ.
    pub fn eval_l(&self, u: f64, s: f64) -> Result<f64> {
        self.check_open(u, s)?;
        Ok(self.l_branch(u, s)?.0)
    }

    /// L(u, s) together with the branch that produced it.
    pub fn l_branch(&self, u: f64, s: f64) -> Result<(f64, Branch)> {
        self.check_open(u, s)?;
        if (u - s).abs() <= self.eps_diag {
            return Ok((self.consts.ell, Branch::Diagonal));
        }
        if s < u {
            Ok((self.l_minus(u, s)?, Branch::Lower))
        } else {
            Ok((self.l_plus(u, s)?, Branch::Upper))
        }
    }

    /// The lower branch L₋(u, s), 0 < s < u < T, without the band cut-off.
    pub fn l_minus(&self, u: f64, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < u && u < self.t_end) {
            return domain(format!("L₋ needs 0 < s < u < T, got u = {u}, s = {s}"));
        }
        let h1 = self.hurst.h1();
        let alpha = self.hurst.alpha();
        let k = &self.consts;
        let z = s / u;
        let r = (self.t_end - u) / (u - s);
        let za = z.powf(alpha);
        let bracket = (k.d3 + k.d5 * z) * self.f(3, z) + k.d4 * za * (1.0 - z) * self.f(4, z)
            - k.d5 * za * self.f(5, z);
        let head = (self.t_end - u).powf(0.5 - h1) * (u - s).powf(h1 - 0.5) * bracket;
        let psi = self.psi_integral(z, r, [1.0, 1.0, 1.0])?.value;
        Ok(head + (h1 - 0.5) * psi)
    }

    /// The upper branch L₊(u, s), 0 < u < s < T, without the band cut-off.
    pub fn l_plus(&self, u: f64, s: f64) -> Result<f64> {
        if !(u > 0.0 && u < s && s < self.t_end) {
            return domain(format!("L₊ needs 0 < u < s < T, got u = {u}, s = {s}"));
        }
        let h1 = self.hurst.h1();
        let h2 = self.hurst.h2();
        let k = &self.consts;
        let hm = h1 - 0.5;
        let z = u / s;
        let r = (self.t_end - s) / (s - u);
        let zpow = z.powf(0.5 - h1);
        let w1 = k.d1 * u.powf(0.5 - h1) * s.powf(2.0 * h2 - 2.0) * (s - u).powf(self.hurst.beta());
        let phi = self.phi_integral(z, w1 * hm, k.d2 * hm * zpow)?.value;
        let lambda = self.lambda_integral(z, r, [1.0, 1.0, 1.0])?.value;
        Ok(w1 * self.f(1, z) + k.d2 * z * zpow * self.f(2, z) + phi - hm * zpow * lambda)
    }

    /// K(u, s) = |u − s|^{γ−1}L(u, s) for u ≠ s.
    pub fn eval_k(&self, u: f64, s: f64) -> Result<f64> {
        if u == s {
            return domain(format!("K is singular on the diagonal (u = s = {u})"));
        }
        Ok((u - s).abs().powf(self.hurst.gamma() - 1.0) * self.eval_l(u, s)?)
    }

    /// The truncated factor L⁽ⁿ⁾(u, s): both arguments clamped into
    /// [1/n, T − 1/n] before evaluating L.
    pub fn eval_l_truncated(&self, n: usize, u: f64, s: f64) -> Result<f64> {
        let (uc, sc) = self.clamp_pair(n, u, s)?;
        self.eval_l(uc, sc)
    }

    /// |u − s|^{γ−1}L⁽ⁿ⁾(u, s); the singular factor uses the original
    /// coordinates.
    pub fn eval_k_truncated(&self, n: usize, u: f64, s: f64) -> Result<f64> {
        if u == s {
            return domain(format!("K is singular on the diagonal (u = s = {u})"));
        }
        Ok((u - s).abs().powf(self.hurst.gamma() - 1.0) * self.eval_l_truncated(n, u, s)?)
    }

    /// Clamps both coordinates into [1/n, T − 1/n].
    pub fn clamp_pair(&self, n: usize, u: f64, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.clamp_bounds(n)?;
        let t = self.t_end;
        if !((0.0..=t).contains(&u) && (0.0..=t).contains(&s)) {
            return domain(format!("arguments must lie in [0, {t}], got ({u}, {s})"));
        }
        Ok((u.clamp(lo, hi), s.clamp(lo, hi)))
    }

    /// [1/n, T − 1/n], which must be a nonempty subinterval of (0, T).
    pub fn clamp_bounds(&self, n: usize) -> Result<(f64, f64)> {
        let lo = 1.0 / n as f64;
        let hi = self.t_end - lo;
        if n < 2 || !(lo < hi) {
            return domain(format!(
                "truncation n = {n} is too small for T = {}",
                self.t_end
            ));
        }
        Ok((lo, hi))
    }

    /// L̃(u, s) = L(u, s)·[u(T−u)]^{H₁−1/2}/[s(T−s)]^{H₁−1/2}, the kernel
    /// factor of the equation for h̃(u) = h(u)·[u(T−u)]^{H₁−1/2}.
    pub fn tilde_l(&self, u: f64, s: f64) -> Result<f64> {
        let l = self.eval_l(u, s)?;
        Ok(l * self.tilde_weight(u) / self.tilde_weight(s))
    }

    /// [u(T−u)]^{H₁−1/2}.
    pub fn tilde_weight(&self, u: f64) -> f64 {
        (u * (self.t_end - u)).powf(self.hurst.h1() - 0.5)
    }

    /// The constant right-hand side of the transformed equation.
    pub fn tilde_rhs(&self) -> f64 {
        1.0 / super::g_denominator(self.hurst.h1())
    }
}
