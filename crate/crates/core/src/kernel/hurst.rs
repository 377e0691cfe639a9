use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which range of H₁ is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HurstMode {
    /// 1/2 < H₁ ≤ 3/4 and H₁ < H₂ < 1, where h_T is known to be unique.
    #[default]
    Strict,
    /// Any 1/2 < H₁ < H₂ < 1.
    Relaxed,
}

/// A validated pair of Hurst indices 1/2 < H₁ < H₂ < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHurst", into = "RawHurst")]
pub struct HurstPair {
    h1: f64,
    h2: f64,
    mode: HurstMode,
}

#[derive(Serialize, Deserialize)]
struct RawHurst {
    h1: f64,
    h2: f64,
    #[serde(default)]
    mode: HurstMode,
}

impl TryFrom<RawHurst> for HurstPair {
    type Error = Error;
    fn try_from(r: RawHurst) -> Result<Self> {
        HurstPair::new(r.h1, r.h2, r.mode)
    }
}

impl From<HurstPair> for RawHurst {
    fn from(h: HurstPair) -> Self {
        RawHurst {
            h1: h.h1,
            h2: h.h2,
            mode: h.mode,
        }
    }
}

impl HurstPair {
    pub fn new(h1: f64, h2: f64, mode: HurstMode) -> Result<Self> {
        if !(h1.is_finite() && h2.is_finite()) {
            return domain(format!(
                "Hurst indices must be finite, got H1 = {h1}, H2 = {h2}"
            ));
        }
        if !(h1 > 0.5) {
            return domain(format!("H1 must exceed 1/2, got {h1}"));
        }
        if !(h2 > h1) {
            return domain(format!("H2 must exceed H1, got H1 = {h1}, H2 = {h2}"));
        }
        if !(h2 < 1.0) {
            return domain(format!("H2 must be below 1, got {h2}"));
        }
        if mode == HurstMode::Strict && h1 > 0.75 {
            return domain(format!(
                "H1 = {h1} exceeds 3/4; uniqueness of h_T is only known for H1 <= 3/4 (use relaxed mode to override)"
            ));
        }
        Ok(Self { h1, h2, mode })
    }

    pub fn strict(h1: f64, h2: f64) -> Result<Self> {
        Self::new(h1, h2, HurstMode::Strict)
    }

    pub fn relaxed(h1: f64, h2: f64) -> Result<Self> {
        Self::new(h1, h2, HurstMode::Relaxed)
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn mode(&self) -> HurstMode {
        self.mode
    }

    /// α = 2H₂ − H₁ − 1/2.
    pub fn alpha(&self) -> f64 {
        2.0 * self.h2 - self.h1 - 0.5
    }

    /// β = 3/2 − 2H₂ + H₁ = 1 − α.
    pub fn beta(&self) -> f64 {
        1.5 - 2.0 * self.h2 + self.h1
    }

    /// γ = 2H₂ − 2H₁, the exponent of the weak singularity |u − s|^{γ−1}.
    pub fn gamma(&self) -> f64 {
        2.0 * (self.h2 - self.h1)
    }
}

impl fmt::Display for HurstPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(H1 = {}, H2 = {})", self.h1, self.h2)
    }
}
