//! Closed-form unit-speed geodesic flow.
//!
//! Every point evolves independently by the scalar problem
//! `2 y y'' + y^2 - y'^2 = 0`, `y(0) = y0`, `y'(0) = z0`, whose solution is
//! `y(t) = alpha cos^2(t/2 - beta)` with `alpha = (y0^2 + z0^2)/y0` and
//! `beta = atan(z0/y0)`. Densities are evaluated through the expanded form
//!
//! ```text
//! f(t) = f0 cos^2(t/2) + (g0^2/f0) sin^2(t/2) + g0 sin t
//! ```
//!
//! which is exact at `t = 0` and integrates to `cos^2 + sin^2 = 1` under the
//! unit-speed hypotheses. The kinetic density `f'^2/f` is computed without
//! dividing by `f`, so zeros of the density along the flow are harmless.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{FiniteDensity, FiniteMeasureSpace, SignedFunction, Space};
use crate::simplex::{metric_inner, SimplexPoint, TangentVector, BOUNDARY_TOL};

/// Accepted deviation of `integral g^2/f0` from one.
pub const UNIT_SPEED_TOL: f64 = 1e-10;
/// Accepted `|integral g|` for a [`UnitVelocity`].
pub const CENTERED_TOL: f64 = 1e-12;
/// Raw velocities with a larger mean are refused by [`normalize_velocity`].
pub const RAW_CENTERED_TOL: f64 = 1e-10;
/// Fisher energies at or below this are degenerate.
pub const DEGENERATE_ENERGY: f64 = 1e-14;

const PAR_THRESHOLD: usize = 1 << 14;

/// Parameters of the scalar problem. Fails for `y0 <= 0`.
pub fn solve_scalar_ivp(y0: f64, z0: f64) -> Result<(f64, f64)> {
    if !(y0 > 0.0) {
        return Err(Error::NonpositiveInitialDensity { value: y0 });
    }
    Ok(((y0 * y0 + z0 * z0) / y0, (z0 / y0).atan()))
}

/// `y`, its first two derivatives and the kinetic term `y'^2 / y` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSample {
    pub y: f64,
    pub ydot: f64,
    pub yddot: f64,
    pub kinetic: f64,
}

pub fn evaluate_scalar(alpha: f64, beta: f64, t: f64) -> ScalarSample {
    let (s, c) = (0.5 * t - beta).sin_cos();
    ScalarSample {
        y: alpha * c * c,
        ydot: -alpha * c * s,
        yddot: -0.5 * alpha * (c * c - s * s),
        kinetic: alpha * s * s,
    }
}

fn same_space(a: &Space, b: &Space) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

fn positive_floor(f0: &FiniteDensity) -> Result<()> {
    let min = f0.values().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NonpositiveInitialDensity { value: min });
    }
    Ok(())
}

fn fisher_energy(f0: &FiniteDensity, g: &[f64]) -> f64 {
    let q: Vec<f64> = g.iter().zip(f0.values()).map(|(g, f)| g * g / f).collect();
    f0.space().integrate(&q)
}

/// A velocity `g0` with `integral g0 = 0` and `integral g0^2/f0 = 1` for its companion `f0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitVelocity {
    g: SignedFunction,
    f0: FiniteDensity,
}

impl UnitVelocity {
    /// Checks both hypotheses; there is no silent renormalization.
    pub fn new(f0: &FiniteDensity, g: SignedFunction) -> Result<Self> {
        same_space(f0.space(), g.space())?;
        positive_floor(f0)?;
        let mean = crate::measure::integrate(&g);
        if mean.abs() > CENTERED_TOL {
            return Err(Error::NotCentered { mean });
        }
        let energy = fisher_energy(f0, g.values());
        if (energy - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::NotUnitSpeed { energy });
        }
        Ok(Self { g, f0: f0.clone() })
    }

    pub fn g(&self) -> &SignedFunction {
        &self.g
    }

    pub fn values(&self) -> &[f64] {
        self.g.values()
    }

    pub fn companion(&self) -> &FiniteDensity {
        &self.f0
    }
}

/// Rescales a centered velocity to unit Fisher energy against `f0`.
pub fn normalize_velocity(f0: &FiniteDensity, g_raw: &SignedFunction) -> Result<UnitVelocity> {
    same_space(f0.space(), g_raw.space())?;
    positive_floor(f0)?;
    let mean = crate::measure::integrate(g_raw);
    if mean.abs() > RAW_CENTERED_TOL {
        return Err(Error::NotCentered { mean });
    }
    let energy = fisher_energy(f0, g_raw.values());
    if !(energy > DEGENERATE_ENERGY) {
        return Err(Error::DegenerateVelocity { energy });
    }
    Ok(UnitVelocity {
        g: g_raw.scaled(energy.sqrt().recip()),
        f0: f0.clone(),
    })
}

/// Per-point closed-form parameters of a geodesic together with its initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    space: Space,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    f0: Vec<f64>,
    g0: Vec<f64>,
    /// `g0^2 / f0`, the density reached at `t = pi`.
    q: Vec<f64>,
}

impl GeodesicState {
    fn from_initial(space: Space, f0: Vec<f64>, g0: Vec<f64>) -> Self {
        let mut alpha = Vec::with_capacity(f0.len());
        let mut beta = Vec::with_capacity(f0.len());
        let mut q = Vec::with_capacity(f0.len());
        for (&f, &g) in f0.iter().zip(&g0) {
            alpha.push((f * f + g * g) / f);
            beta.push((g / f).atan());
            q.push(g * g / f);
        }
        Self {
            space,
            alpha,
            beta,
            f0,
            g0,
            q,
        }
    }

    /// Rebuilds a state from archived `alpha`, `beta`.
    pub fn from_parameters(space: Space, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        for len in [alpha.len(), beta.len()] {
            if len != space.len() {
                return Err(Error::DimensionMismatch {
                    expected: space.len(),
                    actual: len,
                });
            }
        }
        if let Some(a) = alpha.iter().find(|a| !(**a > 0.0)) {
            return Err(Error::NonpositiveInitialDensity { value: *a });
        }
        let f0 = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| a * b.cos().powi(2))
            .collect();
        let g0 = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| a * b.cos() * b.sin())
            .collect();
        let q = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| a * b.sin().powi(2))
            .collect();
        Ok(Self {
            space,
            alpha,
            beta,
            f0,
            g0,
            q,
        })
    }

    /// The simplex geodesic through `p` with unit velocity `v`, on counting measure.
    pub fn simplex(p: &SimplexPoint, v: &TangentVector) -> Result<Self> {
        if p.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                actual: v.dim(),
            });
        }
        let space: Space = FiniteMeasureSpace::counting(p.dim() + 1)?.into();
        let f0 = FiniteDensity::strictly_positive(space.clone(), p.barycentric())?;
        let g0 = UnitVelocity::new(&f0, SignedFunction::new(space, v.full())?)?;
        geodesic_flow(&f0, &g0)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn f0(&self) -> &[f64] {
        &self.f0
    }

    pub fn g0(&self) -> &[f64] {
        &self.g0
    }

    /// `g0^2 / f0`.
    pub fn kinetic0(&self) -> &[f64] {
        &self.q
    }

    fn map_points(&self, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
        if self.len() >= PAR_THRESHOLD {
            (0..self.len()).into_par_iter().map(f).collect()
        } else {
            (0..self.len()).map(f).collect()
        }
    }

    /// `f(x, t)` for every point.
    pub fn density_values(&self, t: f64) -> Vec<f64> {
        let (s, c) = (0.5 * t).sin_cos();
        let (c2, s2, st) = (c * c, s * s, t.sin());
        self.map_points(|i| self.f0[i] * c2 + self.q[i] * s2 + self.g0[i] * st)
    }

    /// `f'^2 / f` for every point, division free.
    pub fn kinetic_values(&self, t: f64) -> Vec<f64> {
        let (s, c) = (0.5 * t).sin_cos();
        let (c2, s2, st) = (c * c, s * s, t.sin());
        self.map_points(|i| self.f0[i] * s2 + self.q[i] * c2 - self.g0[i] * st)
    }

    /// `df/dt` for every point.
    pub fn velocity_values(&self, t: f64) -> Vec<f64> {
        let (st, ct) = t.sin_cos();
        self.map_points(|i| 0.5 * (self.q[i] - self.f0[i]) * st + self.g0[i] * ct)
    }

    /// `d^2 f / dt^2` for every point.
    pub fn acceleration_values(&self, t: f64) -> Vec<f64> {
        let (st, ct) = t.sin_cos();
        self.map_points(|i| 0.5 * (self.q[i] - self.f0[i]) * ct - self.g0[i] * st)
    }
}

/// The geodesic leaving `f0` with velocity `g0`.
pub fn geodesic_flow(f0: &FiniteDensity, g0: &UnitVelocity) -> Result<GeodesicState> {
    same_space(f0.space(), g0.g.space())?;
    positive_floor(f0)?;
    if g0.f0.values() != f0.values() {
        let energy = fisher_energy(f0, g0.values());
        if (energy - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::NotUnitSpeed { energy });
        }
    }
    Ok(GeodesicState::from_initial(
        f0.space().clone(),
        f0.values().to_vec(),
        g0.values().to_vec(),
    ))
}

pub fn density_at(s: &GeodesicState, t: f64) -> FiniteDensity {
    FiniteDensity::from_flow(s.space.clone(), s.density_values(t))
}

pub fn speed_density_at(s: &GeodesicState, t: f64) -> FiniteDensity {
    FiniteDensity::from_flow(s.space.clone(), s.kinetic_values(t))
}

/// Scales `w_raw` onto the unit Fisher ellipsoid at `p`.
pub fn ellipsoid_tangent(p: &SimplexPoint, w_raw: &[f64]) -> Result<TangentVector> {
    if w_raw.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: w_raw.len(),
        });
    }
    let w = TangentVector::new(w_raw.to_vec());
    let norm2 = metric_inner(p, &w, &w);
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok(w.scaled(norm2.sqrt().recip()))
}

/// Unit velocities at the barycenter of the 2-simplex, parametrized by `tau`.
pub fn ellipse_param_n2(tau: f64) -> [f64; 2] {
    let k = std::f64::consts::SQRT_2 / 6.0;
    let r3 = 3f64.sqrt();
    let (s, c) = tau.sin_cos();
    [k * (-r3 * c + s), k * (r3 * c + s)]
}

/// Closed-form simplex geodesic sampled at `times`.
///
/// Fails with `BoundaryTouch` (1-based barycentric coordinate) at the first
/// sampled time where a coordinate is below the open-simplex tolerance.
pub fn simplex_trajectory(
    p0: &SimplexPoint,
    v0: &TangentVector,
    times: &[f64],
) -> Result<Vec<SimplexPoint>> {
    let state = GeodesicState::simplex(p0, v0)?;
    let n = p0.dim();
    times
        .iter()
        .map(|&t| {
            let theta = state.density_values(t);
            if let Some(k) = theta.iter().position(|x| *x < BOUNDARY_TOL) {
                return Err(Error::BoundaryTouch {
                    coordinate: k + 1,
                    time: t,
                });
            }
            SimplexPoint::new(theta[..n].to_vec())
        })
        .collect()
}
