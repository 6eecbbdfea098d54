//! Piecewise-constant functions on `[0,1)^m` given as finite unions of
//! half-open axis-aligned boxes, and their exact cell averages on dyadic grids.
//!
//! Descriptor text format, one box per line:
//!
//! ```text
//! # value  x_lo x_hi  [y_lo y_hi ...]
//! 2        0    1/8
//! -2       1/8  1/4
//! 0        1/4  1
//! ```
//!
//! Numbers may be decimal or `p/q` fractions. Boxes must lie in the unit cube,
//! must not overlap and must cover it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::measure::{compensated_sum, SignedFunction};

const COVER_TOL: f64 = 1e-12;

/// Half-open box `prod_i [lo_i, hi_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn unit(dimension: usize) -> Self {
        Self {
            lo: vec![0.0; dimension],
            hi: vec![1.0; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l).max(0.0))
            .product()
    }

    pub fn intersection(&self, other: &AxisBox) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(self.dimension());
        let mut hi = Vec::with_capacity(self.dimension());
        for i in 0..self.dimension() {
            let l = self.lo[i].max(other.lo[i]);
            let h = self.hi[i].min(other.hi[i]);
            if h <= l {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(AxisBox { lo, hi })
    }

    /// Volume of the intersection with the per-axis bounds of a grid cell.
    fn overlap_with_bounds(&self, bounds: &[(f64, f64)]) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(bounds)
            .map(|((l, h), (bl, bh))| (h.min(*bh) - l.max(*bl)).max(0.0))
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= *l && *v < *h)
    }
}

/// One constant piece of a [`BoxFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxPiece {
    pub value: f64,
    pub region: AxisBox,
}

/// A piecewise-constant function whose pieces partition `[0,1)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFunction {
    dimension: usize,
    pieces: Vec<BoxPiece>,
}

/// A cell of a grid overlapping a piece, with the fraction of the cell covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CellOverlap {
    pub cell: usize,
    pub piece: usize,
    pub fraction: f64,
}

fn invalid(reason: impl Into<String>) -> Error {
    Error::InvalidCatalogFunction {
        reason: reason.into(),
    }
}

impl BoxFunction {
    pub fn new(dimension: usize, pieces: Vec<BoxPiece>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if pieces.is_empty() {
            return Err(invalid("no boxes given"));
        }
        for (i, p) in pieces.iter().enumerate() {
            let r = &p.region;
            if r.lo.len() != dimension || r.hi.len() != dimension {
                return Err(invalid(format!("box {i} has the wrong dimension")));
            }
            if !p.value.is_finite() {
                return Err(invalid(format!("box {i} has non-finite value")));
            }
            for axis in 0..dimension {
                let (l, h) = (r.lo[axis], r.hi[axis]);
                if !(0.0..1.0).contains(&l) || !(h > l && h <= 1.0) {
                    return Err(invalid(format!(
                        "box {i} axis {axis} bounds [{l}, {h}) are empty or outside [0,1)"
                    )));
                }
            }
        }
        for i in 0..pieces.len() {
            for k in i + 1..pieces.len() {
                if let Some(common) = pieces[i].region.intersection(&pieces[k].region) {
                    if common.volume() > COVER_TOL {
                        return Err(invalid(format!("boxes {i} and {k} overlap")));
                    }
                }
            }
        }
        let covered = compensated_sum(pieces.iter().map(|p| p.region.volume()));
        if (covered - 1.0).abs() > COVER_TOL {
            return Err(invalid(format!(
                "boxes cover volume {covered}, not the whole unit cube"
            )));
        }
        Ok(Self { dimension, pieces })
    }

    pub fn constant(dimension: usize, value: f64) -> Result<Self> {
        Self::new(
            dimension,
            vec![BoxPiece {
                value,
                region: AxisBox::unit(dimension),
            }],
        )
    }

    /// Builds from `(value, lo, hi)` triples.
    pub fn from_boxes(dimension: usize, boxes: &[(f64, &[f64], &[f64])]) -> Result<Self> {
        let pieces = boxes
            .iter()
            .map(|(v, lo, hi)| BoxPiece {
                value: *v,
                region: AxisBox::new(lo.to_vec(), hi.to_vec()),
            })
            .collect();
        Self::new(dimension, pieces)
    }

    /// Parses the descriptor text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dimension = None;
        let mut pieces = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(parse_number)
                .collect::<Option<_>>()
                .ok_or_else(|| invalid(format!("line {}: unparsable number", lineno + 1)))?;
            if fields.len() < 3 || fields.len() % 2 == 0 {
                return Err(invalid(format!(
                    "line {}: expected `value lo hi [lo hi ...]`, got {} fields",
                    lineno + 1,
                    fields.len()
                )));
            }
            let m = (fields.len() - 1) / 2;
            match dimension {
                None => dimension = Some(m),
                Some(d) if d != m => {
                    return Err(invalid(format!(
                        "line {}: dimension {m} differs from earlier lines ({d})",
                        lineno + 1
                    )))
                }
                _ => {}
            }
            let lo = (0..m).map(|a| fields[1 + 2 * a]).collect();
            let hi = (0..m).map(|a| fields[2 + 2 * a]).collect();
            pieces.push(BoxPiece {
                value: fields[0],
                region: AxisBox::new(lo, hi),
            });
        }
        let dimension = dimension.ok_or_else(|| invalid("descriptor contains no boxes"))?;
        Self::new(dimension, pieces)
    }

    /// Writes the descriptor text format with round-trip number formatting.
    pub fn to_descriptor(&self) -> String {
        let mut out = String::new();
        for p in &self.pieces {
            let _ = write!(out, "{:?}", p.value);
            for a in 0..self.dimension {
                let _ = write!(out, " {:?} {:?}", p.region.lo[a], p.region.hi[a]);
            }
            out.push('\n');
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn pieces(&self) -> &[BoxPiece] {
        &self.pieces
    }

    pub fn integral(&self) -> f64 {
        compensated_sum(self.pieces.iter().map(|p| p.value * p.region.volume()))
    }

    pub fn min_value(&self) -> f64 {
        self.pieces.iter().map(|p| p.value).fold(f64::INFINITY, f64::min)
    }

    /// Point evaluation; `None` outside `[0,1)^m`.
    pub fn evaluate(&self, x: &[f64]) -> Option<f64> {
        self.pieces
            .iter()
            .find(|p| p.region.contains(x))
            .map(|p| p.value)
    }

    /// Same partition, values mapped piecewise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dimension: self.dimension,
            pieces: self
                .pieces
                .iter()
                .map(|p| BoxPiece {
                    value: f(p.value),
                    region: p.region.clone(),
                })
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// Every cell overlapping a piece, with the covered fraction of the cell.
    pub(crate) fn overlaps(&self, grid: &DyadicGrid) -> Result<Vec<CellOverlap>> {
        if grid.dimension() as usize != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: grid.dimension() as usize,
            });
        }
        let inv_cell = grid.cell_weight().recip();
        let mut out = Vec::new();
        for (pi, piece) in self.pieces.iter().enumerate() {
            let ranges: Vec<_> = (0..self.dimension)
                .map(|a| grid.axis_range(piece.region.lo[a], piece.region.hi[a]))
                .collect();
            for_each_multi(&ranges, |multi| {
                let cell = grid.linear_index(multi);
                let bounds = grid.cell_bounds(cell);
                let vol = piece.region.overlap_with_bounds(&bounds);
                if vol > 0.0 {
                    out.push(CellOverlap {
                        cell,
                        piece: pi,
                        fraction: vol * inv_cell,
                    });
                }
            });
        }
        Ok(out)
    }

    /// Exact cell averages `2^(m j) * integral over Q_k of f`.
    pub fn project(&self, grid: &DyadicGrid) -> Result<SignedFunction> {
        let values = average_piece_values(
            &self.overlaps(grid)?,
            grid.cell_count(),
            |pi| self.pieces[pi].value,
        );
        SignedFunction::new((*grid).into(), values)
    }
}

/// Cell averages of a piecewise constant function given per-piece values.
pub(crate) fn average_piece_values(
    overlaps: &[CellOverlap],
    cells: usize,
    value: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; cells];
    for o in overlaps {
        out[o.cell] += o.fraction * value(o.piece);
    }
    out
}

/// Cell-average projection of a box function onto a dyadic grid.
pub fn cell_average_projection(f: &BoxFunction, grid: &DyadicGrid) -> Result<SignedFunction> {
    f.project(grid)
}

/// Pairwise intersections of two partitions, each carrying both values.
pub fn common_refinement(a: &BoxFunction, b: &BoxFunction) -> Result<Vec<(AxisBox, f64, f64)>> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch {
            expected: a.dimension,
            actual: b.dimension,
        });
    }
    let mut out = Vec::new();
    for pa in &a.pieces {
        for pb in &b.pieces {
            if let Some(region) = pa.region.intersection(&pb.region) {
                out.push((region, pa.value, pb.value));
            }
        }
    }
    Ok(out)
}

/// Builds a function from an already-validated partition.
pub(crate) fn from_partition(dimension: usize, pieces: Vec<BoxPiece>) -> BoxFunction {
    BoxFunction { dimension, pieces }
}

fn parse_number(token: &str) -> Option<f64> {
    match token.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            (q != 0.0).then(|| p / q)
        }
        None => token.parse().ok(),
    }
}

fn for_each_multi(ranges: &[std::ops::Range<usize>], mut f: impl FnMut(&[usize])) {
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut multi: Vec<usize> = ranges.iter().map(|r| r.start).collect();
    loop {
        f(&multi);
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            multi[axis] += 1;
            if multi[axis] < ranges[axis].end {
                break;
            }
            multi[axis] = ranges[axis].start;
        }
    }
}
