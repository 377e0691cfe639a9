use crate::error::{domain, Result};
use crate::quad::{integrate_graded_dist, QuadSettings};

/// (Γ_H f)(t) = H(2H−1)∫₀ᵀ f(s)|t−s|^{2H−2} ds for t ∈ (0, T), H ∈ (1/2, 1).
///
/// `edge_exponent` is the power σ > −1 with which f may blow up or vanish
/// at s = 0 and s = T; it only steers the grading of the quadrature.
pub fn gamma_operator<F: Fn(f64) -> f64>(
    hurst: f64,
    t_end: f64,
    f: F,
    t: f64,
    edge_exponent: f64,
    quad: &QuadSettings,
) -> Result<f64> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return domain(format!("Γ_H needs H in (1/2, 1), got {hurst}"));
    }
    if !(t > 0.0 && t < t_end) {
        return domain(format!("Γ_H is evaluated on (0, {t_end}), got t = {t}"));
    }
    if !(edge_exponent > -1.0) {
        return domain(format!("edge exponent must exceed −1, got {edge_exponent}"));
    }
    let e = 2.0 * hurst - 2.0;
    let q = 2.0 / (2.0 * hurst - 1.0);
    let p = (2.0 / (1.0 + edge_exponent)).max(1.0);
    let left = integrate_graded_dist(|s, _, d| f(s) * d.powf(e), 0.0, t, p, q, quad)?;
    let right = integrate_graded_dist(|s, d, _| f(s) * d.powf(e), t, t_end, q, p, quad)?;
    Ok(hurst * (2.0 * hurst - 1.0) * (left.value + right.value))
}
