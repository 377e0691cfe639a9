//! Gauss hypergeometric function ₂F₁(a, b; c; z) on z ∈ [0, 1].
//!
//! For z ≤ 1/2 the defining power series is summed directly. For z > 1/2
//! the connection formula to argument 1 − z is used,
//!
//! ```text
//! F(a,b;c;z) = Γ(c)Γ(λ)/(Γ(c−a)Γ(c−b)) · F(a,b;1−λ;1−z)
//!            + Γ(c)Γ(−λ)/(Γ(a)Γ(b))   · (1−z)^λ · F(c−a,c−b;1+λ;1−z),
//! ```
//!
//! with λ = c − a − b, so both series again converge geometrically. The
//! gamma-function prefactors depend only on the parameters and are cached in
//! [`HyperParams`]. When λ is (numerically) an integer the connection formula
//! degenerates and the direct series is summed instead, which is slow but
//! finite for z < 1.

use serde::{Deserialize, Serialize};

use super::gamma::{gamma_real, rgamma};
use crate::error::{domain, Error, Result};

/// Relative size of a series term at which summation stops.
pub const SERIES_TOLERANCE: f64 = 1e-16;
/// Maximum number of series terms before a convergence error is raised.
pub const SERIES_MAX_TERMS: usize = 100_000;

/// Distance of λ from the nearest integer below which the connection
/// formula is considered degenerate.
const INTEGER_LAMBDA_GUARD: f64 = 1e-6;

/// Parameters (a, b; c) of a ₂F₁ together with cached connection
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Endpoint exponent λ = c − a − b.
    pub lambda: f64,
    #[serde(skip)]
    connection: Option<Connection>,
}

/// Prefactors of the two branches of the connection formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Connection {
    pub regular: f64,
    pub singular: f64,
}

impl HyperParams {
    /// Validates `c > b > 0` (the Euler-integral regime) and precomputes the
    /// connection coefficients.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return domain(format!(
                "non-finite hypergeometric parameters ({a}, {b}; {c})"
            ));
        }
        if !(b > 0.0) {
            return domain(format!("hyp2f1 requires b > 0, got b = {b}"));
        }
        if !(c > b) {
            return domain(format!("hyp2f1 requires c > b, got b = {b}, c = {c}"));
        }
        let lambda = c - a - b;
        let connection = if (lambda - lambda.round()).abs() > INTEGER_LAMBDA_GUARD {
            let gc = gamma_real(c);
            Some(Connection {
                regular: gc * gamma_real(lambda) * rgamma(c - a) * rgamma(c - b),
                singular: gc * gamma_real(-lambda) * rgamma(a) * rgamma(b),
            })
        } else {
            None
        };
        Ok(Self {
            a,
            b,
            c,
            lambda,
            connection,
        })
    }

    pub(crate) fn connection(&self) -> Option<Connection> {
        self.connection
    }

    /// Value at z = 1, finite only for λ > 0.
    pub fn value_at_one(&self) -> Result<f64> {
        if !(self.lambda > 0.0) {
            return domain(format!(
                "₂F₁({}, {}; {}; 1) diverges (c − a − b = {} ≤ 0)",
                self.a, self.b, self.c, self.lambda
            ));
        }
        Ok(gamma_real(self.c)
            * gamma_real(self.lambda)
            * rgamma(self.c - self.a)
            * rgamma(self.c - self.b))
    }

    /// Evaluates ₂F₁(a, b; c; z) for z ∈ [0, 1].
    pub fn eval(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return domain(format!("hyp2f1 argument must lie in [0, 1], got {z}"));
        }
        if z == 0.0 {
            return Ok(1.0);
        }
        if z == 1.0 {
            return self.value_at_one();
        }
        if z <= 0.5 {
            return power_series(self.a, self.b, self.c, z);
        }
        match self.connection {
            Some(conn) => {
                let w = 1.0 - z;
                let (regular, singular) = self.connection_branches(w)?;
                Ok(conn.regular * regular + conn.singular * w.powf(self.lambda) * singular)
            }
            None => power_series(self.a, self.b, self.c, z),
        }
    }

    /// The two series of the connection formula at w = 1 − z, without
    /// prefactors: F(a,b;1−λ;w) and F(c−a,c−b;1+λ;w).
    pub(crate) fn connection_branches(&self, w: f64) -> Result<(f64, f64)> {
        let regular = power_series(self.a, self.b, 1.0 - self.lambda, w)?;
        let singular = power_series(self.c - self.a, self.c - self.b, 1.0 + self.lambda, w)?;
        Ok((regular, singular))
    }
}

/// ₂F₁(a, b; c; z) for z ∈ [0, 1] with `c > b > 0`.
pub fn hyp2f1(p: &HyperParams, z: f64) -> Result<f64> {
    p.eval(z)
}

/// Sums the hypergeometric series at |z| < 1.
pub(crate) fn power_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() <= SERIES_TOLERANCE * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "₂F₁({a}, {b}; {c}; {z}) series did not converge within {SERIES_MAX_TERMS} terms"
    )))
}
