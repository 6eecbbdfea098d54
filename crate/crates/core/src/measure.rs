//! Finite weighted measure spaces and the functions that live on them.
//!
//! Two kinds of space are supported: an explicit list of atom weights (the
//! simplex case uses counting measure) and a [`DyadicGrid`] whose cells all
//! carry weight `2^(-m j)`. Densities and signed functions are value vectors
//! tied to a space; integration is the weighted sum.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;

/// Tolerance on `integral f dmu = 1` accepted by [`FiniteDensity`] constructors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Atoms `0..N` with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMeasureSpace {
    weights: Arc<[f64]>,
}

impl FiniteMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidSpace {
                reason: format!("need at least 2 atoms, got {}", weights.len()),
            });
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpace {
                reason: format!("weight {i} is {w}, must be positive and finite"),
            });
        }
        Ok(Self {
            weights: weights.into(),
        })
    }

    /// Counting measure on `n` atoms.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The space a function is defined on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Space {
    Atoms(FiniteMeasureSpace),
    Grid(DyadicGrid),
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Atoms(s) => s.len(),
            Space::Grid(g) => g.cell_count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, i: usize) -> f64 {
        match self {
            Space::Atoms(s) => s.weights()[i],
            Space::Grid(g) => g.cell_weight(),
        }
    }

    pub fn grid(&self) -> Option<&DyadicGrid> {
        match self {
            Space::Grid(g) => Some(g),
            Space::Atoms(_) => None,
        }
    }

    pub fn total_measure(&self) -> f64 {
        match self {
            Space::Atoms(s) => compensated_sum(s.weights().iter().copied()),
            Space::Grid(_) => 1.0,
        }
    }

    /// `sum_i values[i] * mu_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        match self {
            Space::Atoms(s) => {
                compensated_sum(values.iter().zip(s.weights()).map(|(v, w)| v * w))
            }
            // Uniform weight: factor it out, the product by a power of two is exact.
            Space::Grid(g) => compensated_sum(values.iter().copied()) * g.cell_weight(),
        }
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: values.len(),
            });
        }
        Ok(())
    }
}

impl From<DyadicGrid> for Space {
    fn from(g: DyadicGrid) -> Self {
        Space::Grid(g)
    }
}

impl From<FiniteMeasureSpace> for Space {
    fn from(s: FiniteMeasureSpace) -> Self {
        Space::Atoms(s)
    }
}

/// A real-valued function on a finite space. No sign constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedFunction {
    space: Space,
    values: Vec<f64>,
}

impl SignedFunction {
    pub fn new(space: Space, values: Vec<f64>) -> Result<Self> {
        space.check_len(&values)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity {
                reason: "function values must be finite".into(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Integral of `h` against the measure of its space.
pub fn integrate(h: &SignedFunction) -> f64 {
    h.space.integrate(&h.values)
}

/// A non-negative function integrating to one.
///
/// Densities built with [`FiniteDensity::strictly_positive`] additionally carry
/// their positive lower bound `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDensity {
    space: Space,
    values: Vec<f64>,
    floor: Option<f64>,
}

impl FiniteDensity {
    pub fn new(space: Space, values: Vec<f64>) -> Result<Self> {
        space.check_len(&values)?;
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidDensity {
                reason: format!("value {v} is negative or not finite"),
            });
        }
        let mass = space.integrate(&values);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("total mass {mass} differs from 1"),
            });
        }
        Ok(Self {
            space,
            values,
            floor: None,
        })
    }

    /// Like [`FiniteDensity::new`] but requires every value to be positive and
    /// records the minimum as the lower bound `delta`.
    pub fn strictly_positive(space: Space, values: Vec<f64>) -> Result<Self> {
        let mut d = Self::new(space, values)?;
        let min = d.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(Error::NonpositiveInitialDensity { value: min });
        }
        d.floor = Some(min);
        Ok(d)
    }

    /// Wraps values produced by the closed-form flow, which are normalized by
    /// construction up to rounding.
    pub(crate) fn from_flow(space: Space, values: Vec<f64>) -> Self {
        Self {
            space,
            values,
            floor: None,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The stored lower bound, present only for strictly positive densities.
    pub fn floor(&self) -> Option<f64> {
        self.floor
    }

    pub fn mass(&self) -> f64 {
        self.space.integrate(&self.values)
    }

    pub fn as_signed(&self) -> SignedFunction {
        SignedFunction {
            space: self.space.clone(),
            values: self.values.clone(),
        }
    }
}
