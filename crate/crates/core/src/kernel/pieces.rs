//! ψ, ρ and the singular integrals Φ, Ψ, Λ built on top of them.

use super::KernelModel;
use crate::error::{domain, Result};
use crate::quad::{
    integrate_graded, integrate_graded_dist, integrate_log, integrate_to_infinity, Estimate,
};

/// (Φ₁, Φ₂).
pub type PhiPair = (f64, f64);
/// (X₁, X₂, X₃) for X ∈ {Ψ, Λ}.
pub type Triple = [f64; 3];

impl KernelModel {
    /// ψ(u, s) for 0 < u < s.
    pub fn eval_psi(&self, u: f64, s: f64) -> Result<f64> {
        if !(u > 0.0 && u < s) {
            return domain(format!("ψ(u, s) needs 0 < u < s, got u = {u}, s = {s}"));
        }
        let h1 = self.hurst.h1();
        let h2 = self.hurst.h2();
        let k = &self.consts;
        let z = u / s;
        let v = k.d1 * u.powf(1.0 - 2.0 * h1) * s.powf(2.0 * h2 - 2.0) * self.f(1, z)
            + k.d2
                * u.powf(2.0 - 2.0 * h1)
                * s.powf(h1 - 1.5)
                * (s - u).powf(self.hurst.alpha() - 1.0)
                * self.f(2, z);
        finite(v, "ψ")
    }

    /// The (φ, τ) split of ρ(u, s) for 0 < s < u.
    pub fn eval_rho_parts(&self, u: f64, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0 && s < u) {
            return domain(format!("ρ(u, s) needs 0 < s < u, got u = {u}, s = {s}"));
        }
        let h1 = self.hurst.h1();
        let h2 = self.hurst.h2();
        let alpha = self.hurst.alpha();
        let k = &self.consts;
        let z = s / u;
        let d = u - s;
        let sa = s.powf(alpha);
        let varphi = d.powf(alpha - 1.0) * u.powf(-h1 - 0.5) * (k.d3 * u + k.d5 * s) * self.f(3, z)
            + k.d4 * u.powf(-2.0 * h2) * sa * d.powf(alpha) * self.f(4, z);
        let tau = -k.d5 * u.powf(1.0 - 2.0 * h2) * sa * d.powf(alpha - 1.0) * self.f(5, z);
        Ok((finite(varphi, "φ")?, finite(tau, "τ")?))
    }

    /// ρ(u, s) = φ(u, s) + τ(u, s) for 0 < s < u.
    pub fn eval_rho(&self, u: f64, s: f64) -> Result<f64> {
        let (a, b) = self.eval_rho_parts(u, s)?;
        Ok(a + b)
    }

    /// (Φ₁(z), Φ₂(z)) for z ∈ [0, 1].
    pub fn eval_phi12(&self, z: f64) -> Result<PhiPair> {
        check_unit(z, "Φ")?;
        let p1 = self.phi_integral(z, 1.0, 0.0)?;
        let p2 = self.phi_integral(z, 0.0, 1.0)?;
        Ok((p1.value, p2.value))
    }

    /// ∫₀¹ [w₁·(Φ₁ integrand) + w₂·(Φ₂ integrand)] dy.
    pub(crate) fn phi_integral(&self, z: f64, w1: f64, w2: f64) -> Result<Estimate> {
        let h1 = self.hurst.h1();
        let am1 = self.hurst.alpha() - 1.0;
        let f1z = self.f(1, z);
        let zf2z = z * self.f(2, z);
        let integrand = |y: f64, _: f64, omy: f64| {
            let zy = z + (1.0 - z) * y;
            let mut bracket = 0.0;
            if w1 != 0.0 {
                bracket += w1 * (f1z - self.f(1, zy));
            }
            if w2 != 0.0 {
                bracket += w2 * (zf2z - zy * omy.powf(am1) * self.f(2, zy));
            }
            bracket * y.powf(-h1 - 0.5)
        };
        let p = 2.0 / (1.5 - h1);
        let q = 2.0 / self.hurst.alpha();
        integrate_graded_dist(integrand, 0.0, 1.0, p, q, &self.options.quad)
    }

    /// (Ψ₁, Ψ₂, Ψ₃)(z, R) for z ∈ (0, 1], R ∈ (0, ∞].
    pub fn eval_psi_triple(&self, z: f64, r: f64) -> Result<Triple> {
        check_zr(z, r, "Ψ")?;
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            let mut w = [0.0; 3];
            w[j] = 1.0;
            *o = self.psi_integral(z, r, w)?.value;
        }
        Ok(out)
    }

    /// ∫₀ᴿ Σⱼ wⱼ·(Ψⱼ integrand) dx.
    pub(crate) fn psi_integral(&self, z: f64, r: f64, w: [f64; 3]) -> Result<Estimate> {
        let h1 = self.hurst.h1();
        let h2 = self.hurst.h2();
        let alpha = self.hurst.alpha();
        let k = &self.consts;
        let za = z.powf(alpha);
        let omz = 1.0 - z;
        let c1 = w[0];
        let c2 = w[1] * k.d4 * za * omz;
        let c3 = -w[2] * k.d5 * za;
        let base1 = (k.d3 + k.d5 * z) * self.f(3, z);
        let base2 = self.f(4, z);
        let base3 = self.f(5, z);
        let e_w2 = 2.0 * h1 - 2.0 * h2 - 1.0;
        let e_w3 = 2.0 * h1 - 2.0 * h2;
        let integrand = |x: f64| {
            let wx = 1.0 + omz * x;
            let zx = z / wx;
            let onex = 1.0 + x;
            let p_am1 = onex.powf(alpha - 1.0);
            let mut bracket = 0.0;
            if c1 != 0.0 {
                let q1 = p_am1 * wx.powf(h1 - 0.5);
                bracket += c1 * (base1 - q1 * (k.d3 + k.d5 * zx) * self.f(3, zx));
            }
            if c2 != 0.0 {
                let q2 = p_am1 * onex * wx.powf(e_w2);
                bracket += c2 * (base2 - q2 * self.f(4, zx));
            }
            if c3 != 0.0 {
                let q3 = p_am1 * wx.powf(e_w3);
                bracket += c3 * (base3 - q3 * self.f(5, zx));
            }
            bracket * x.powf(-h1 - 0.5)
        };
        let p = 2.0 / (1.5 - h1);
        self.half_line(integrand, z, r, p, h1 - 0.5)
    }

    /// (Λ₁, Λ₂, Λ₃)(z, R) for z ∈ (0, 1], R ∈ (0, ∞].
    pub fn eval_lambda_triple(&self, z: f64, r: f64) -> Result<Triple> {
        check_zr(z, r, "Λ")?;
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            let mut w = [0.0; 3];
            w[j] = 1.0;
            *o = self.lambda_integral(z, r, w)?.value;
        }
        Ok(out)
    }

    /// ∫₀ᴿ Σⱼ wⱼ·(Λⱼ integrand) dx.
    pub(crate) fn lambda_integral(&self, z: f64, r: f64, w: [f64; 3]) -> Result<Estimate> {
        let h1 = self.hurst.h1();
        let h2 = self.hurst.h2();
        let alpha = self.hurst.alpha();
        let k = &self.consts;
        let omz = 1.0 - z;
        let c1 = w[0];
        let c2 = w[1] * k.d4 * omz;
        let c3 = -w[2] * k.d5;
        let integrand = |x: f64| {
            let wx = 1.0 + omz * x;
            let yx = 1.0 / wx;
            let common = x.powf(alpha - 1.0) * (1.0 + x).powf(-h1 - 0.5);
            let mut sum = 0.0;
            if c1 != 0.0 {
                sum += c1 * wx.powf(h1 - 1.5) * ((k.d3 + k.d5) + k.d3 * omz * x) * self.f(3, yx);
            }
            if c2 != 0.0 {
                sum += c2 * x * wx.powf(2.0 * h1 - 2.0 * h2 - 1.0) * self.f(4, yx);
            }
            if c3 != 0.0 {
                sum += c3 * wx.powf(2.0 * h1 - 2.0 * h2) * self.f(5, yx);
            }
            common * sum
        };
        let p = 2.0 / alpha;
        self.half_line(integrand, z, r, p, self.hurst.beta())
    }

    /// ∫₀ᴿ f, graded at 0 with exponent `p`; the remainder is split at 1
    /// and 1/(1 − z) and integrated in log scale, with an algebraic map for
    /// an infinite upper limit assuming decay no slower than x^{−1−μ}.
    fn half_line<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        z: f64,
        r: f64,
        p: f64,
        mu: f64,
    ) -> Result<Estimate> {
        let qs = &self.options.quad;
        let head_end = r.min(1.0);
        let mut total = integrate_graded(&mut f, 0.0, head_end, p, 1.0, qs)?;
        if r <= 1.0 {
            return Ok(total);
        }
        let mut add = |e: Estimate| {
            total.value += e.value;
            total.error += e.error;
        };
        let knee = if z < 1.0 {
            1.0 / (1.0 - z)
        } else {
            f64::INFINITY
        };
        let mut lo = 1.0;
        if knee > lo && knee < r {
            add(integrate_log(&mut f, lo, knee, qs)?);
            lo = knee;
        }
        if r.is_finite() {
            add(integrate_log(&mut f, lo, r, qs)?);
        } else {
            add(integrate_to_infinity(&mut f, lo, 1.0 / mu, qs)?);
        }
        Ok(total)
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::Error::Convergence(format!(
            "{what} evaluated to {v}"
        )))
    }
}

fn check_unit(z: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        domain(format!("{what} argument z must lie in [0, 1], got {z}"))
    }
}

fn check_zr(z: f64, r: f64, what: &str) -> Result<()> {
    if !(z > 0.0 && z <= 1.0) {
        return domain(format!("{what}(z, R) needs z in (0, 1], got {z}"));
    }
    if !(r > 0.0) || r.is_nan() {
        return domain(format!("{what}(z, R) needs R > 0, got {r}"));
    }
    Ok(())
}
