//! Level-`j` dyadic partitions of the unit cube `[0,1)^m`.
//!
//! Cells are the half-open boxes `Q_k = prod_i [k_i 2^-j, (k_i+1) 2^-j)` indexed by a
//! multi-index `k in {0, .., 2^j - 1}^m`. The linear index is row-major with the
//! last coordinate varying fastest:
//!
//! ```text
//! index(k) = ((k_1 * n + k_2) * n + k_3) ... * n + k_m,   n = 2^j
//! ```
//!
//! CSV frame exports rely on this ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `m * j`; keeps `2^(m j)` addressable and allocations sane.
pub const MAX_TOTAL_BITS: u32 = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicGrid {
    dimension: u32,
    level: u32,
}

impl DyadicGrid {
    pub fn new(dimension: u32, level: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpace {
                reason: "grid dimension must be at least 1".into(),
            });
        }
        if dimension.saturating_mul(level) > MAX_TOTAL_BITS {
            return Err(Error::InvalidSpace {
                reason: format!(
                    "grid of dimension {dimension} at level {level} exceeds 2^{MAX_TOTAL_BITS} cells"
                ),
            });
        }
        Ok(Self { dimension, level })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per axis, `2^j`.
    pub fn cells_per_axis(&self) -> usize {
        1usize << self.level
    }

    /// Total number of cells, `2^(m j)`.
    pub fn cell_count(&self) -> usize {
        1usize << (self.dimension * self.level)
    }

    /// Side length `2^-j`.
    pub fn cell_side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Measure of one cell, `2^(-m j)`. Exact in binary floating point.
    pub fn cell_weight(&self) -> f64 {
        (-((self.dimension * self.level) as f64)).exp2()
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dimension as usize);
        let n = self.cells_per_axis();
        multi.iter().fold(0, |acc, &k| {
            debug_assert!(k < n);
            acc * n + k
        })
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let n = self.cells_per_axis();
        let m = self.dimension as usize;
        let mut out = vec![0; m];
        for slot in out.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    /// Lower-left corner `k 2^-j` of the cell.
    pub fn cell_corner(&self, index: usize) -> Vec<f64> {
        let h = self.cell_side();
        self.multi_index(index)
            .into_iter()
            .map(|k| k as f64 * h)
            .collect()
    }

    /// Cell midpoint `(k + 1/2) 2^-j`.
    pub fn cell_center(&self, index: usize) -> Vec<f64> {
        let h = self.cell_side();
        self.multi_index(index)
            .into_iter()
            .map(|k| (k as f64 + 0.5) * h)
            .collect()
    }

    /// Per-axis bounds `[lo, hi)` of the cell.
    pub fn cell_bounds(&self, index: usize) -> Vec<(f64, f64)> {
        let h = self.cell_side();
        self.multi_index(index)
            .into_iter()
            .map(|k| (k as f64 * h, (k + 1) as f64 * h))
            .collect()
    }

    /// The next-finer grid.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dimension, self.level + 1)
    }

    /// Index of the level-`(j-1)` cell containing this cell. `None` at level 0.
    pub fn parent(&self, index: usize) -> Option<usize> {
        if self.level == 0 {
            return None;
        }
        let coarse = Self {
            dimension: self.dimension,
            level: self.level - 1,
        };
        let multi: Vec<usize> = self.multi_index(index).into_iter().map(|k| k / 2).collect();
        Some(coarse.linear_index(&multi))
    }

    /// The `2^m` level-`(j+1)` cells partitioning this cell, in increasing index order.
    pub fn children(&self, index: usize) -> Vec<usize> {
        let fine = Self {
            dimension: self.dimension,
            level: self.level + 1,
        };
        let base: Vec<usize> = self.multi_index(index).into_iter().map(|k| 2 * k).collect();
        let m = self.dimension as usize;
        let mut out: Vec<usize> = (0..1usize << m)
            .map(|bits| {
                let multi: Vec<usize> = base
                    .iter()
                    .enumerate()
                    .map(|(axis, &b)| b + ((bits >> (m - 1 - axis)) & 1))
                    .collect();
                fine.linear_index(&multi)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Range of per-axis cell indices overlapping `[lo, hi)` with positive length.
    pub(crate) fn axis_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let n = self.cells_per_axis();
        let scale = n as f64;
        let first = ((lo * scale).floor().max(0.0) as usize).min(n);
        let last = ((hi * scale).ceil().max(0.0) as usize).min(n);
        first..last.max(first)
    }
}
