//! Piecewise-linear lookup tables for ₂F₁ on [0, 1].
//!
//! Near z = 1 the function behaves like F(1) − C(1 − z)^λ with λ ∈ (0, 1),
//! so its derivative is unbounded and plain linear interpolation loses
//! accuracy in the last few cells. Cells close to 1 therefore interpolate the
//! two smooth branches of the connection formula separately and recombine
//! them with the exact factor (1 − z)^λ. Node values are exact in both
//! regimes.

use super::hyper::HyperParams;
use crate::error::{domain, Result};

/// Left-node abscissa from which cells use the split representation.
pub const SINGULAR_BAND_START: f64 = 0.98;

/// Immutable interpolation table for one parameter triple.
#[derive(Debug, Clone)]
pub struct InterpolationTable {
    params: HyperParams,
    step: f64,
    inv_step: f64,
    /// Index of the left node of the last cell.
    last_cell: usize,
    /// (F(zᵢ), F(zᵢ₊₁) − F(zᵢ)) per node; the last difference is zero.
    nodes: Vec<[f64; 2]>,
    /// First node index whose cell uses the split representation.
    band_start: usize,
    /// Connection prefactors multiplied into the branch series, stored for
    /// nodes `band_start..`.
    regular: Vec<f64>,
    singular: Vec<f64>,
    max_deviation: f64,
}

impl InterpolationTable {
    /// Tabulates F on `grid_size` equally spaced nodes of [0, 1] and records
    /// the largest deviation from direct evaluation at the cell midpoints.
    pub fn new(params: HyperParams, grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return domain(format!(
                "interpolation table needs at least 2 nodes, got {grid_size}"
            ));
        }
        if !(params.lambda > 0.0) {
            return domain(format!(
                "interpolation table needs a finite value at z = 1 (λ = {})",
                params.lambda
            ));
        }
        let cells = grid_size - 1;
        let step = 1.0 / cells as f64;
        let node = |i: usize| if i == cells { 1.0 } else { i as f64 * step };

        let values = (0..grid_size)
            .map(|i| params.eval(node(i)))
            .collect::<Result<Vec<_>>>()?;
        let nodes = values
            .iter()
            .enumerate()
            .map(|(i, &v)| [v, values.get(i + 1).map_or(0.0, |w| w - v)])
            .collect();

        let (band_start, regular, singular) = match params.connection() {
            Some(conn) if grid_size > 2 => {
                let start = ((SINGULAR_BAND_START / step).ceil() as usize).min(cells);
                let mut regular = Vec::with_capacity(grid_size - start);
                let mut singular = Vec::with_capacity(grid_size - start);
                for i in start..grid_size {
                    let (r, s) = params.connection_branches(1.0 - node(i))?;
                    regular.push(conn.regular * r);
                    singular.push(conn.singular * s);
                }
                (start, regular, singular)
            }
            _ => (grid_size, Vec::new(), Vec::new()),
        };

        let mut table = Self {
            params,
            step,
            inv_step: cells as f64,
            last_cell: cells - 1,
            nodes,
            band_start,
            regular,
            singular,
            max_deviation: 0.0,
        };
        table.max_deviation = table.deviation_on_refinement(2)?;
        Ok(table)
    }

    pub fn params(&self) -> &HyperParams {
        &self.params
    }

    pub fn grid_size(&self) -> usize {
        self.nodes.len()
    }

    /// Largest |lookup − direct| observed at the cell midpoints during
    /// construction.
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation
    }

    /// Interpolated value at z ∈ [0, 1]. Arguments outside the interval are
    /// clamped.
    #[inline]
    pub fn lookup(&self, z: f64) -> f64 {
        let x = z.clamp(0.0, 1.0) * self.inv_step;
        let i = (x as usize).min(self.last_cell);
        let t = x - i as f64;
        if i < self.band_start {
            let [v, d] = self.nodes[i];
            v + t * d
        } else {
            let k = i - self.band_start;
            let r = self.regular[k] + t * (self.regular[k + 1] - self.regular[k]);
            let s = self.singular[k] + t * (self.singular[k + 1] - self.singular[k]);
            r + (1.0 - z).max(0.0).powf(self.params.lambda) * s
        }
    }

    /// Maximum deviation from direct evaluation over `refine` equal
    /// subdivisions of every cell (interior points only).
    pub fn deviation_on_refinement(&self, refine: usize) -> Result<f64> {
        let refine = refine.max(2);
        let cells = self.nodes.len() - 1;
        let mut worst = 0.0_f64;
        for i in 0..cells {
            for k in 1..refine {
                let z = (i as f64 + k as f64 / refine as f64) * self.step;
                let err = (self.lookup(z) - self.params.eval(z)?).abs();
                worst = worst.max(err);
            }
        }
        Ok(worst)
    }
}

/// Builds an [`InterpolationTable`] with `grid_size` nodes.
pub fn hyp2f1_table(p: &HyperParams, grid_size: usize) -> Result<InterpolationTable> {
    InterpolationTable::new(*p, grid_size)
}
