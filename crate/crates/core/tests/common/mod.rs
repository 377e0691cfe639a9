//! Brute-force oracles for the kernel pieces, written against their
//! defining integrals in the original variables. The hypergeometric factors
//! are evaluated by direct series; the singular integrals by graded
//! adaptive quadrature with tolerances tighter than the library defaults.

#![allow(dead_code)]

use dmfbm_core::kernel::{hyper_params, KernelConstants};
use dmfbm_core::quad::{integrate_graded_dist, QuadSettings};
use dmfbm_core::specfun::HyperParams;
use dmfbm_core::{HurstPair, KernelModel, KernelOptions};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// H₁ ∈ [0.55, 0.75], H₂ ∈ [H₁ + 0.05, 0.95].
pub fn random_pair(r: &mut ChaCha8Rng) -> HurstPair {
    let h1 = r.gen_range(0.55..=0.75);
    let h2 = r.gen_range(h1 + 0.05..=0.95);
    HurstPair::strict(h1, h2).unwrap()
}

/// Ordered pair a < b in [0.05, 0.95] with b − a ≥ 0.05.
pub fn random_ordered(r: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let a: f64 = r.gen_range(0.05..0.95);
        let b: f64 = r.gen_range(0.05..0.95);
        if (a - b).abs() >= 0.05 {
            return (a.min(b), a.max(b));
        }
    }
}

pub fn fine() -> QuadSettings {
    QuadSettings {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
    }
}

fn quad<F: FnMut(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, p: f64, q: f64) -> f64 {
    integrate_graded_dist(f, a, b, p, q, &fine()).unwrap().value
}

/// Five-point central difference.
fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub struct Oracle {
    pub h: HurstPair,
    pub t_end: f64,
    pub k: KernelConstants,
    f: [HyperParams; 5],
}

impl Oracle {
    pub fn new(h: HurstPair, t_end: f64) -> Self {
        let model = KernelModel::new(h, t_end, KernelOptions::direct()).unwrap();
        Self {
            h,
            t_end,
            k: *model.constants(),
            f: hyper_params(&h).unwrap(),
        }
    }

    fn f(&self, k: usize, z: f64) -> f64 {
        let arg = if k == 3 || k == 4 { 1.0 - z } else { z };
        self.f[k - 1].eval(arg.clamp(0.0, 1.0)).unwrap()
    }

    /// ψ(u, s) = ∂ᵤ ∫₀ᵘ (u−t)^{1/2−H₁} t^{1/2−H₁} (s−t)^{2H₂−2} dt, u < s.
    pub fn psi(&self, u: f64, s: f64) -> f64 {
        let e = 0.5 - self.h.h1();
        let h2 = self.h.h2();
        let g2 = |v: f64| {
            // t = v·x.
            let p = 2.0 / (1.0 + e);
            v.powf(1.0 + 2.0 * e)
                * quad(
                    |x, _, omx| omx.powf(e) * x.powf(e) * (s - v * x).powf(2.0 * h2 - 2.0),
                    0.0,
                    1.0,
                    p,
                    p,
                )
        };
        derivative(g2, u, 1e-3 * u.min(s - u))
    }

    /// ρ(u, s) = φ + τ for s < u, with φ = ∂ᵤ ∫ₛᵘ (u−t)^{1/2−H₁} t^{1/2−H₁}
    /// (t−s)^{2H₂−2} dt and τ = −(H₁−1/2) ∫₀ˢ (u−t)^{−1/2−H₁} t^{1/2−H₁}
    /// (s−t)^{2H₂−2} dt.
    pub fn rho(&self, u: f64, s: f64) -> f64 {
        let h1 = self.h.h1();
        let h2 = self.h.h2();
        let e = 0.5 - h1;
        let ee = 2.0 * h2 - 2.0;
        let i_of = |v: f64| {
            // t = s + (v − s)x.
            let d = v - s;
            d.powf(1.0 + e + ee)
                * quad(
                    |x, _, omx| omx.powf(e) * (s + d * x).powf(e) * x.powf(ee),
                    0.0,
                    1.0,
                    2.0 / (1.0 + ee),
                    2.0 / (1.0 + e),
                )
        };
        let varphi = derivative(i_of, u, 1e-3 * s.min(u - s));
        let tau = -(h1 - 0.5)
            * quad(
                |t, _, st| (u - t).powf(-0.5 - h1) * t.powf(e) * st.powf(ee),
                0.0,
                s,
                2.0 / (1.0 + e),
                2.0 / (1.0 + ee),
            );
        varphi + tau
    }

    /// The two terms of ψ(t, s) multiplied by t^{2H₁−1}.
    fn psi_terms_scaled(&self, t: f64, s: f64, st: f64) -> [f64; 2] {
        let h1 = self.h.h1();
        let h2 = self.h.h2();
        let z = t / s;
        [
            self.k.d1 * s.powf(2.0 * h2 - 2.0) * self.f(1, z),
            self.k.d2 * t * s.powf(h1 - 1.5) * st.powf(self.h.alpha() - 1.0) * self.f(2, z),
        ]
    }

    /// ∫ᵤˢ (u^{2H₁−1}ψₖ(u,s) − t^{2H₁−1}ψₖ(t,s)) (t−u)^{−H₁−1/2} dt for
    /// each term ψₖ of ψ, u < s.
    pub fn phi_parts(&self, u: f64, s: f64) -> [f64; 2] {
        let h1 = self.h.h1();
        let base = self.psi_terms_scaled(u, s, s - u);
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            *o = quad(
                |t, tu, st| (base[k] - self.psi_terms_scaled(t, s, st)[k]) * tu.powf(-h1 - 0.5),
                u,
                s,
                2.0 / (1.5 - h1),
                2.0 / self.h.alpha(),
            );
        }
        out
    }

    /// (Φ₁(z), Φ₂(z)) recovered from [`Oracle::phi_parts`] at (u, s).
    pub fn phi12(&self, u: f64, s: f64) -> (f64, f64) {
        let h1 = self.h.h1();
        let h2 = self.h.h2();
        let [a, b] = self.phi_parts(u, s);
        let d = s - u;
        (
            a / (self.k.d1 * s.powf(2.0 * h2 - 2.0) * d.powf(0.5 - h1)),
            b / (self.k.d2 * s.powf(h1 - 0.5) * d.powf(self.h.alpha() - h1 - 0.5)),
        )
    }

    /// The three terms ρⱼ(t, s) of ρ, s < t, given ts = t − s.
    fn rho_terms(&self, t: f64, s: f64, ts: f64) -> [f64; 3] {
        let h1 = self.h.h1();
        let h2 = self.h.h2();
        let a = self.h.alpha();
        let z = s / t;
        let k = &self.k;
        let sa = s.powf(a);
        [
            ts.powf(a - 1.0) * t.powf(-h1 - 0.5) * (k.d3 * t + k.d5 * s) * self.f(3, z),
            k.d4 * t.powf(-2.0 * h2) * sa * ts.powf(a) * self.f(4, z),
            -k.d5 * t.powf(1.0 - 2.0 * h2) * sa * ts.powf(a - 1.0) * self.f(5, z),
        ]
    }

    /// Ψⱼ at z = s/u, R = (T−u)/(u−s) for s < u, from
    /// ∫ᵤᵀ (u^{2H₁−1}ρⱼ(u,s) − t^{2H₁−1}ρⱼ(t,s)) (t−u)^{−H₁−1/2} dt.
    pub fn psi_triple(&self, u: f64, s: f64) -> [f64; 3] {
        let h1 = self.h.h1();
        let w = 2.0 * h1 - 1.0;
        let base = self.rho_terms(u, s, u - s).map(|v| u.powf(w) * v);
        let scale = u.powf(0.5 - h1) * (u - s).powf(1.0 - self.h.gamma());
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = scale
                * quad(
                    |t, tu, _| {
                        (base[j] - t.powf(w) * self.rho_terms(t, s, (u - s) + tu)[j])
                            * tu.powf(-h1 - 0.5)
                    },
                    u,
                    self.t_end,
                    2.0 / (1.5 - h1),
                    1.0,
                );
        }
        out
    }

    /// Λⱼ at z = u/s, R = (T−s)/(s−u) for u < s, from
    /// ∫ₛᵀ (t−u)^{−1/2−H₁} t^{2H₁−1} ρⱼ(t,s) dt.
    pub fn lambda_triple(&self, u: f64, s: f64) -> [f64; 3] {
        let h1 = self.h.h1();
        let scale = s.powf(0.5 - h1) * (s - u).powf(1.0 - self.h.gamma());
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = scale
                * quad(
                    |t, ts, _| {
                        (t - u).powf(-0.5 - h1)
                            * t.powf(2.0 * h1 - 1.0)
                            * self.rho_terms(t, s, ts)[j]
                    },
                    s,
                    self.t_end,
                    2.0 / self.h.alpha(),
                    1.0,
                );
        }
        out
    }
}

/// (1/δ)∫ of the half-hat against |t_i − s|^{γ−1} by graded quadrature.
pub fn weight_by_quadrature(right_half: bool, j: usize, i: usize, n: usize, t: f64, g: f64) -> f64 {
    let d = t / n as f64;
    let (a, b) = if right_half {
        (j as f64 * d, (j + 1) as f64 * d)
    } else {
        (j as f64 * d - d, j as f64 * d)
    };
    let ti = i as f64 * d;
    let at_left = i as f64 * d == a;
    let at_right = i as f64 * d == b;
    let p = if at_left { 2.0 / g } else { 1.0 };
    let q = if at_right { 2.0 / g } else { 1.0 };
    let quad = QuadSettings::with_tol(1e-16, 1e-13);
    integrate_graded_dist(
        |s, da, db| {
            let dist = if at_left {
                da
            } else if at_right {
                db
            } else {
                (ti - s).abs()
            };
            let hat = if right_half { db } else { da };
            hat * dist.powf(g - 1.0) / d
        },
        a,
        b,
        p,
        q,
        &quad,
    )
    .unwrap()
    .value
}

/// |a − b| / |b|.
pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// One Richardson step on L at (t ± ε) for ε = 2⁻¹³T and 2⁻¹⁴T, with error
/// model ε^{1−γ}. Returns the (lower, upper) extrapolated limits.
pub fn diagonal_limits(model: &KernelModel, t: f64) -> (f64, f64) {
    let p = 1.0 - model.hurst().gamma();
    let step = |a: f64, b: f64| (2f64.powf(p) * b - a) / (2f64.powf(p) - 1.0);
    let eps: Vec<f64> = (13..=14).map(|k| model.horizon() * 2f64.powi(-k)).collect();
    let lower: Vec<f64> = eps
        .iter()
        .map(|&e| model.l_minus(t + e, t - e).unwrap())
        .collect();
    let upper: Vec<f64> = eps
        .iter()
        .map(|&e| model.l_plus(t - e, t + e).unwrap())
        .collect();
    (step(lower[0], lower[1]), step(upper[0], upper[1]))
}
