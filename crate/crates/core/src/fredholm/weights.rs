//! Product-integration weights for the singular factor |t − s|^{γ−1}.
//!
//! Nodes are t_j = jδ, j = 0..=N, δ = T/N. With the hat function φ_j split
//! into its right half (on [t_j, t_{j+1}]) and left half (on
//! [t_{j−1}, t_j]),
//!
//! ```text
//! ψ¹_{j,i} = (1/δ)∫_{t_j}^{t_{j+1}} (t_{j+1} − s)|t_i − s|^{γ−1} ds,
//! ψ²_{j,i} = (1/δ)∫_{t_{j−1}}^{t_j} (s − t_{j−1})|t_i − s|^{γ−1} ds,
//! ```
//!
//! so ψ¹_{j,i} + ψ²_{j,i} = ∫ φ_j(s)|t_i − s|^{γ−1} ds. The right half does
//! not exist for j = N and the left half not for j = 0.

/// Offset from which [`near`] and [`far`] switch to the binomial series;
/// the closed forms lose about 2k²/(γ(γ+1)) ulps to cancellation.
const SERIES_FROM: f64 = 8.0;

/// ((k+1)^{γ+1} − k^γ(k+γ+1)) / (γ(γ+1)).
fn near(k: f64, g: f64) -> f64 {
    if k >= SERIES_FROM {
        return tail_series(k, g, 1.0);
    }
    ((k + 1.0).powf(g + 1.0) - k.powf(g) * (k + g + 1.0)) / (g * (g + 1.0))
}

/// ((k−1)^{γ+1} − k^γ(k−γ−1)) / (γ(γ+1)), k ≥ 1.
fn far(k: f64, g: f64) -> f64 {
    if k >= SERIES_FROM {
        return tail_series(k, g, -1.0);
    }
    ((k - 1.0).powf(g + 1.0) - k.powf(g) * (k - g - 1.0)) / (g * (g + 1.0))
}

/// k^{γ+1}[(1 ± 1/k)^{γ+1} − 1 ∓ (γ+1)/k] / (γ(γ+1)) summed as
/// k^{γ+1} Σ_{m≥2} C(γ+1, m)(±1/k)^m / (γ(γ+1)).
fn tail_series(k: f64, g: f64, sign: f64) -> f64 {
    let a = g + 1.0;
    let x = sign / k;
    let mut coef = 0.5 * x * x;
    let mut sum = coef;
    for m in 2..200 {
        let mf = m as f64;
        coef *= (a - mf) / (mf + 1.0) * x;
        sum += coef;
        if coef.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    k.powf(a) * sum
}

/// ψ¹_{j,i} on the grid with `n` intervals over [0, t_end].
pub fn weight_psi1(j: usize, i: usize, n: usize, t_end: f64, gamma: f64) -> f64 {
    if j >= n {
        return 0.0;
    }
    let scale = (t_end / n as f64).powf(gamma);
    if i <= j {
        scale * near((j - i) as f64, gamma)
    } else {
        scale * far((i - j) as f64, gamma)
    }
}

/// ψ²_{j,i} on the grid with `n` intervals over [0, t_end].
pub fn weight_psi2(j: usize, i: usize, n: usize, t_end: f64, gamma: f64) -> f64 {
    if j == 0 || j > n {
        return 0.0;
    }
    let scale = (t_end / n as f64).powf(gamma);
    if i < j {
        scale * far((j - i) as f64, gamma)
    } else {
        scale * near((i - j) as f64, gamma)
    }
}

/// Both weights for all (j, i) depend only on the signed offset j − i, so a
/// row of ψ¹ + ψ² is cheap to tabulate once per grid.
#[derive(Debug, Clone)]
pub struct WeightTable {
    n: usize,
    scale: f64,
    near: Vec<f64>,
    far: Vec<f64>,
}

impl WeightTable {
    pub fn new(n: usize, t_end: f64, gamma: f64) -> Self {
        let near_v = (0..=n).map(|k| near(k as f64, gamma)).collect();
        let far_v = (0..=n)
            .map(|k| if k == 0 { 0.0 } else { far(k as f64, gamma) })
            .collect();
        Self {
            n,
            scale: (t_end / n as f64).powf(gamma),
            near: near_v,
            far: far_v,
        }
    }

    /// ψ¹_{j,i} + ψ²_{j,i}.
    #[inline]
    pub fn combined(&self, j: usize, i: usize) -> f64 {
        let mut w = 0.0;
        if j < self.n {
            w += if i <= j {
                self.near[j - i]
            } else {
                self.far[i - j]
            };
        }
        if j > 0 {
            w += if i < j {
                self.far[j - i]
            } else {
                self.near[i - j]
            };
        }
        self.scale * w
    }
}
