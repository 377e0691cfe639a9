//! Real-parameter special functions: Γ, B and the Gauss hypergeometric
//! function on [0, 1], plus lookup tables for the latter.

mod gamma;
mod hyper;
mod table;

pub use gamma::{beta_fn, gamma_fn};
pub(crate) use gamma::{beta_unchecked, gamma_real};
pub use hyper::{hyp2f1, HyperParams, SERIES_MAX_TERMS, SERIES_TOLERANCE};
pub use table::{hyp2f1_table, InterpolationTable, SINGULAR_BAND_START};

/// ∫₀¹ y^{−μ−1}((1−y)^{−ν} − 1) dy for μ, ν ∈ (0, 1).
pub fn beta_integral_unit(mu: f64, nu: f64) -> f64 {
    (mu + nu - 1.0) / mu * beta_unchecked(1.0 - mu, 1.0 - nu) + 1.0 / mu
}

/// ∫₀^∞ x^{−μ−1}(1 − (1+x)^{−ν}) dx for μ, ν ∈ (0, 1).
pub fn beta_integral_halfline(mu: f64, nu: f64) -> f64 {
    nu / mu * beta_unchecked(1.0 - mu, mu + nu)
}
