//! Gamma and beta functions for real arguments.

use crate::error::{domain, Result};

/// Γ(x) for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!(
            "gamma_fn requires a finite positive argument, got {x}"
        ));
    }
    Ok(gamma_real(x))
}

/// Γ(x) for any real `x` that is not a pole. Poles yield `inf`.
///
/// Negative arguments are needed by the connection formula of ₂F₁ for Γ(−λ).
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    statrs::function::gamma::gamma(x)
}

/// 1/Γ(x), exactly zero at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma_real(x)
    }
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for `a, b > 0`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!(
            "beta_fn requires positive arguments, got ({a}, {b})"
        ));
    }
    Ok(beta_unchecked(a, b))
}

pub(crate) fn beta_unchecked(a: f64, b: f64) -> f64 {
    gamma_real(a) * gamma_real(b) / gamma_real(a + b)
}
