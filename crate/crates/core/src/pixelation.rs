//! Dyadic pixelation of continuum initial data and weak-convergence errors.
//!
//! A ladder projects a continuum pair `(f0, g0)` of box functions onto level-`j`
//! grids, renormalizes the projected velocity by `alpha_j = integral (g0^j)^2 / f0^j`
//! and builds the discrete geodesic at every non-degenerate level.
//!
//! Weak errors compare a discrete geodesic with the continuum one on a finer
//! reference grid `J_ref`: the continuum density is averaged exactly over each
//! reference cell (box arithmetic on the piecewise closed form), the discrete
//! density is lifted by constant extension, and the test function is sampled
//! at reference-cell midpoints. The only approximation is that sampling of `phi`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxfn::{average_piece_values, common_refinement, from_partition, BoxFunction, BoxPiece, CellOverlap};
use crate::error::{Error, Result};
use crate::geodesic::{geodesic_flow, normalize_velocity, GeodesicState, UnitVelocity, DEGENERATE_ENERGY};
use crate::grid::DyadicGrid;
use crate::measure::{compensated_sum, FiniteDensity, SignedFunction, Space};

/// Tolerance on the continuum hypotheses checked by [`build_ladder`].
pub const HYPOTHESIS_TOL: f64 = 1e-12;

/// Reference grids sit this many levels above the finest ladder level by default.
pub const REFERENCE_OFFSET: u32 = 4;

/// One level of a [`PixelationLadder`].
#[derive(Debug, Clone)]
pub struct LadderLevel {
    pub level: u32,
    pub grid: DyadicGrid,
    pub f0: FiniteDensity,
    pub g0: SignedFunction,
    pub alpha: f64,
    /// `None` at degenerate levels.
    pub velocity: Option<UnitVelocity>,
    pub state: Option<GeodesicState>,
}

impl LadderLevel {
    pub fn is_degenerate(&self) -> bool {
        self.state.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct PixelationLadder {
    f0: BoxFunction,
    g0: BoxFunction,
    delta: f64,
    levels: Vec<LadderLevel>,
    /// Common refinement of `f0` and `g0`; piece `i` carries `(f, g, g^2/f)` in `piece_data[i]`.
    refinement: BoxFunction,
    piece_data: Vec<[f64; 3]>,
}

impl PixelationLadder {
    pub fn f0(&self) -> &BoxFunction {
        &self.f0
    }

    pub fn g0(&self) -> &BoxFunction {
        &self.g0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dimension(&self) -> usize {
        self.f0.dimension()
    }

    pub fn levels(&self) -> &[LadderLevel] {
        &self.levels
    }

    pub fn level(&self, j: u32) -> Option<&LadderLevel> {
        self.levels.iter().find(|l| l.level == j)
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().map(|l| l.level).max().unwrap_or(0)
    }

    /// Exact continuum density at time `t` on each refinement piece.
    fn continuum_piece(&self, i: usize, t: f64) -> f64 {
        let [f, g, q] = self.piece_data[i];
        let (s, c) = (0.5 * t).sin_cos();
        f * c * c + q * s * s + g * t.sin()
    }
}

fn violation(condition: &str) -> Error {
    Error::HypothesisViolation {
        condition: condition.to_string(),
    }
}

/// Projects `(f0, g0)` on every level and builds the discrete geodesics.
pub fn build_ladder(
    f0: &BoxFunction,
    g0: &BoxFunction,
    levels: &[u32],
    delta: f64,
) -> Result<PixelationLadder> {
    if f0.dimension() != g0.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f0.dimension(),
            actual: g0.dimension(),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(violation("delta > 0"));
    }
    if f0.min_value() < delta {
        return Err(violation("f0 >= delta"));
    }
    if (f0.integral() - 1.0).abs() > HYPOTHESIS_TOL {
        return Err(violation("integral f0 = 1"));
    }
    if g0.integral().abs() > HYPOTHESIS_TOL {
        return Err(violation("integral g0 = 0"));
    }
    let pieces = common_refinement(f0, g0)?;
    let energy = compensated_sum(pieces.iter().map(|(r, f, g)| r.volume() * g * g / f));
    if (energy - 1.0).abs() > HYPOTHESIS_TOL {
        return Err(violation("integral g0^2/f0 = 1"));
    }
    if levels.is_empty() {
        return Err(Error::InvalidSpace {
            reason: "ladder needs at least one level".into(),
        });
    }
    let piece_data = pieces.iter().map(|(_, f, g)| [*f, *g, g * g / f]).collect();
    let refinement = from_partition(
        f0.dimension(),
        pieces
            .into_iter()
            .map(|(region, _, _)| BoxPiece { value: 0.0, region })
            .collect(),
    );

    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let dim = f0.dimension() as u32;
    let built = sorted
        .par_iter()
        .map(|&j| build_level(f0, g0, DyadicGrid::new(dim, j)?))
        .collect::<Result<Vec<_>>>()?;

    Ok(PixelationLadder {
        f0: f0.clone(),
        g0: g0.clone(),
        delta,
        levels: built,
        refinement,
        piece_data,
    })
}

fn build_level(f0: &BoxFunction, g0: &BoxFunction, grid: DyadicGrid) -> Result<LadderLevel> {
    let space: Space = grid.into();
    let f0j = FiniteDensity::strictly_positive(space, f0.project(&grid)?.into_values())?;
    let g0j = g0.project(&grid)?;
    let q: Vec<f64> = g0j
        .values()
        .iter()
        .zip(f0j.values())
        .map(|(g, f)| g * g / f)
        .collect();
    let alpha = f0j.space().integrate(&q);
    let (velocity, state) = if alpha > DEGENERATE_ENERGY {
        let v = normalize_velocity(&f0j, &g0j)?;
        let s = geodesic_flow(&f0j, &v)?;
        (Some(v), Some(s))
    } else {
        (None, None)
    };
    Ok(LadderLevel {
        level: grid.level(),
        grid,
        f0: f0j,
        g0: g0j,
        alpha,
        velocity,
        state,
    })
}

/// `(j, alpha_j)` for every level, degenerate ones included.
pub fn alpha_sequence(ladder: &PixelationLadder) -> Vec<(u32, f64)> {
    ladder.levels.iter().map(|l| (l.level, l.alpha)).collect()
}

/// `phi(x) = prod_a max(0, 1 - |x_a - c_a| / r)^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    center: Vec<f64>,
    radius: f64,
    power: u32,
}

impl TestFunction {
    pub fn new(center: Vec<f64>, radius: f64, power: u32) -> Result<Self> {
        let bad = |reason: String| Error::InvalidTestFunction { reason };
        if center.is_empty() {
            return Err(bad("center must have at least one coordinate".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(bad(format!("radius {radius} must be positive")));
        }
        if power == 0 {
            return Err(bad("power must be at least 1".into()));
        }
        if let Some(c) = center.iter().find(|c| !(**c - radius > 0.0 && **c + radius < 1.0)) {
            return Err(bad(format!(
                "support [{}, {}] is not strictly inside (0,1)",
                c - radius,
                c + radius
            )));
        }
        Ok(Self {
            center,
            radius,
            power,
        })
    }

    pub fn tent(center: f64, radius: f64) -> Result<Self> {
        Self::new(vec![center], radius, 1)
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn sup_norm(&self) -> f64 {
        1.0
    }

    pub fn label(&self) -> String {
        let c: Vec<String> = self.center.iter().map(|c| format!("{c}")).collect();
        format!("tent^{}(c=({}), r={})", self.power, c.join(","), self.radius)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(x)
            .map(|(c, x)| (1.0 - (x - c).abs() / self.radius).max(0.0))
            .product::<f64>()
            .powi(self.power as i32)
    }
}

const CENTERS: [f64; 3] = [0.3, 0.5, 0.7];
const RADII_1D: [f64; 2] = [0.2, 0.25];
const RADIUS_2D: f64 = 0.2;

/// Tents and squared tents at three centers and two radii: 12 functions.
pub fn test_functions_1d() -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(12);
    for c in CENTERS {
        for r in RADII_1D {
            for power in [1, 2] {
                out.push(TestFunction::new(vec![c], r, power).expect("catalog tent is valid"));
            }
        }
    }
    out
}

/// Products of tents on a 3x3 grid of centers: 9 functions.
pub fn test_functions_2d() -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(9);
    for cx in CENTERS {
        for cy in CENTERS {
            out.push(TestFunction::new(vec![cx, cy], RADIUS_2D, 1).expect("catalog tent is valid"));
        }
    }
    out
}

pub fn test_functions(dimension: usize) -> Vec<TestFunction> {
    match dimension {
        1 => test_functions_1d(),
        2 => test_functions_2d(),
        _ => Vec::new(),
    }
}

/// The three discrepancies for `f0^j`, the renormalized velocity and its kinetic density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeTermErrors {
    pub e_f: f64,
    /// Absent at degenerate levels.
    pub e_g: Option<f64>,
    pub e_q: Option<f64>,
}

/// Index of the level-`j` ancestor of a level-`big` cell in dimension `m`.
fn ancestor(index: usize, m: usize, big: u32, j: u32) -> usize {
    let mask = (1usize << big) - 1;
    let shift = big - j;
    let mut out = 0usize;
    for a in 0..m {
        let k = (index >> ((m - 1 - a) as u32 * big)) & mask;
        out = (out << j) | (k >> shift);
    }
    out
}

/// Reference-grid machinery shared by many weak-error evaluations.
pub struct WeakProbe<'a> {
    ladder: &'a PixelationLadder,
    reference: DyadicGrid,
    overlaps: Vec<CellOverlap>,
}

impl<'a> WeakProbe<'a> {
    pub fn new(ladder: &'a PixelationLadder, j_ref: u32) -> Result<Self> {
        if j_ref <= ladder.max_level() {
            return Err(Error::InvalidSpace {
                reason: format!(
                    "reference level {j_ref} must exceed the finest ladder level {}",
                    ladder.max_level()
                ),
            });
        }
        let reference = DyadicGrid::new(ladder.dimension() as u32, j_ref)?;
        let overlaps = ladder.refinement.overlaps(&reference)?;
        Ok(Self {
            ladder,
            reference,
            overlaps,
        })
    }

    /// The default reference level, `max_level + 4`.
    pub fn with_default_reference(ladder: &'a PixelationLadder) -> Result<Self> {
        Self::new(ladder, ladder.max_level() + REFERENCE_OFFSET)
    }

    pub fn reference(&self) -> &DyadicGrid {
        &self.reference
    }

    fn level(&self, j: u32) -> Result<&'a LadderLevel> {
        self.ladder.level(j).ok_or_else(|| Error::InvalidSpace {
            reason: format!("level {j} is not part of the ladder"),
        })
    }

    fn check_phi(&self, phi: &TestFunction) -> Result<()> {
        if phi.dimension() != self.ladder.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.ladder.dimension(),
                actual: phi.dimension(),
            });
        }
        Ok(())
    }

    fn phi_samples(&self, phi: &TestFunction) -> Vec<f64> {
        (0..self.reference.cell_count())
            .into_par_iter()
            .map(|c| phi.evaluate(&self.reference.cell_center(c)))
            .collect()
    }

    fn reference_values(&self, piece_value: impl Fn(usize) -> f64) -> Vec<f64> {
        average_piece_values(&self.overlaps, self.reference.cell_count(), piece_value)
    }

    /// `|h_ref sum_c (discrete(ancestor c) - reference c) phi_c|`.
    fn discrepancy(&self, level: u32, discrete: &[f64], reference: &[f64], phi: &[f64]) -> f64 {
        let m = self.ladder.dimension();
        let big = self.reference.level();
        let total = compensated_sum((0..reference.len()).map(|c| {
            (discrete[ancestor(c, m, big, level)] - reference[c]) * phi[c]
        }));
        (total * self.reference.cell_weight()).abs()
    }

    /// Weak errors of the level-`j` geodesic at time `t` against each test function.
    /// `None` at a degenerate level.
    pub fn weak_errors(&self, j: u32, t: f64, phis: &[TestFunction]) -> Result<Option<Vec<f64>>> {
        let level = self.level(j)?;
        for phi in phis {
            self.check_phi(phi)?;
        }
        let Some(state) = &level.state else {
            return Ok(None);
        };
        let discrete = state.density_values(t);
        let reference = self.reference_values(|i| self.ladder.continuum_piece(i, t));
        Ok(Some(
            phis.iter()
                .map(|phi| self.discrepancy(j, &discrete, &reference, &self.phi_samples(phi)))
                .collect(),
        ))
    }

    pub fn weak_error(&self, j: u32, t: f64, phi: &TestFunction) -> Result<Option<f64>> {
        Ok(self
            .weak_errors(j, t, std::slice::from_ref(phi))?
            .map(|v| v[0]))
    }

    pub fn three_term(&self, j: u32, phi: &TestFunction) -> Result<ThreeTermErrors> {
        let level = self.level(j)?;
        self.check_phi(phi)?;
        let samples = self.phi_samples(phi);
        let data = &self.ladder.piece_data;
        let term = |discrete: &[f64], k: usize| {
            let reference = self.reference_values(|i| data[i][k]);
            self.discrepancy(j, discrete, &reference, &samples)
        };
        let e_f = term(level.f0.values(), 0);
        let (e_g, e_q) = match &level.velocity {
            Some(v) => {
                let q: Vec<f64> = v
                    .values()
                    .iter()
                    .zip(level.f0.values())
                    .map(|(g, f)| g * g / f)
                    .collect();
                (Some(term(v.values(), 1)), Some(term(&q, 2)))
            }
            None => (None, None),
        };
        Ok(ThreeTermErrors { e_f, e_g, e_q })
    }
}

/// `|integral f^j(t) phi dmu_j - integral f(t) phi dy|`; `None` at a degenerate level.
pub fn weak_error(
    ladder: &PixelationLadder,
    j: u32,
    t: f64,
    phi: &TestFunction,
    j_ref: u32,
) -> Result<Option<f64>> {
    WeakProbe::new(ladder, j_ref)?.weak_error(j, t, phi)
}

pub fn three_term_errors(
    ladder: &PixelationLadder,
    j: u32,
    phi: &TestFunction,
    j_ref: u32,
) -> Result<ThreeTermErrors> {
    WeakProbe::new(ladder, j_ref)?.three_term(j, phi)
}
