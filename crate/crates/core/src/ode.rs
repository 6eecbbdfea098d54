//! Fixed-step RK4 oracles for the geodesic equations.
//!
//! Two systems share the integrator through [`OdeSystem`]:
//!
//! - `coupled`: `2 theta_k'' = -(theta_k/theta_{n+1}) (sum theta')^2 + theta_k'^2/theta_k - theta_k sum theta_j'^2/theta_j`
//!   on the `n` free simplex coordinates, with `theta_{n+1} = 1 - sum theta_i` recomputed at
//!   every stage so mass is conserved by construction;
//! - `decoupled`: `y_k'' = (y_k'^2 - y_k^2) / (2 y_k)` for independent coordinates.
//!
//! Integration aborts with `LeftDomain` as soon as any stage state has a
//! coordinate at or below [`DOMAIN_EPS`]; there is no reflection or projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{coupled_force, SimplexPoint, TangentVector};

pub const DOMAIN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    step: f64,
    t_end: f64,
}

impl IntegratorConfig {
    pub fn new(step: f64, t_end: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidIntegrator {
                reason: format!("step must be positive, got {step}"),
            });
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidIntegrator {
                reason: format!("t_end must be finite and non-negative, got {t_end}"),
            });
        }
        if t_end > 0.0 && step > t_end {
            return Err(Error::InvalidIntegrator {
                reason: format!("step {step} exceeds t_end {t_end}"),
            });
        }
        Ok(Self { step, t_end })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `ceil(t_end / step)`, ignoring a last step shorter than `1e-9` steps.
    pub fn steps(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        (self.t_end / self.step - 1e-9).ceil().max(1.0) as usize
    }

    /// Time after step `i`; the last one is `t_end` exactly.
    pub fn time(&self, i: usize) -> f64 {
        if i >= self.steps() {
            self.t_end
        } else {
            i as f64 * self.step
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory {
    times: Vec<f64>,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
}

impl OdeTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A second-order system `x'' = a(x, x')` on a domain with positive coordinates.
pub trait OdeSystem: Send + Sync {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn acceleration(&self, x: &[f64], v: &[f64], out: &mut [f64]);

    /// First coordinate (1-based) at or below [`DOMAIN_EPS`], if any.
    fn exit_coordinate(&self, x: &[f64]) -> Option<usize>;
}

/// The coupled geodesic system on the free coordinates of the `n`-simplex.
#[derive(Debug, Clone, Copy)]
pub struct CoupledSystem {
    pub n: usize,
}

impl OdeSystem for CoupledSystem {
    fn name(&self) -> &'static str {
        "coupled"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn acceleration(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        let last = 1.0 - x.iter().sum::<f64>();
        for (k, a) in out.iter_mut().enumerate() {
            *a = -0.5 * coupled_force(x, last, v, k);
        }
    }

    fn exit_coordinate(&self, x: &[f64]) -> Option<usize> {
        if let Some(k) = x.iter().position(|t| !(*t > DOMAIN_EPS)) {
            return Some(k + 1);
        }
        let last = 1.0 - x.iter().sum::<f64>();
        (!(last > DOMAIN_EPS)).then_some(self.n + 1)
    }
}

/// Independent scalar equations `2 y y'' + y^2 - y'^2 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct DecoupledSystem {
    pub n: usize,
}

impl OdeSystem for DecoupledSystem {
    fn name(&self) -> &'static str {
        "decoupled"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn acceleration(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        for ((a, y), z) in out.iter_mut().zip(x).zip(v) {
            *a = (z * z - y * y) / (2.0 * y);
        }
    }

    fn exit_coordinate(&self, x: &[f64]) -> Option<usize> {
        x.iter().position(|y| !(*y > DOMAIN_EPS)).map(|k| k + 1)
    }
}

/// The systems available by name.
pub fn system_by_name(name: &str, n: usize) -> Option<Box<dyn OdeSystem>> {
    match name {
        "coupled" => Some(Box::new(CoupledSystem { n })),
        "decoupled" => Some(Box::new(DecoupledSystem { n })),
        _ => None,
    }
}

pub const SYSTEM_NAMES: &[&str] = &["coupled", "decoupled"];

fn axpy(base: &[f64], h: f64, dir: &[f64], out: &mut [f64]) {
    for ((o, b), d) in out.iter_mut().zip(base).zip(dir) {
        *o = b + h * d;
    }
}

/// Classical fixed-step RK4 on `(x, x')`.
pub fn rk4(
    sys: &dyn OdeSystem,
    x0: &[f64],
    v0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<OdeTrajectory> {
    let n = sys.dim();
    for len in [x0.len(), v0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let left = |time: f64, coordinate: usize| Error::LeftDomain { time, coordinate };
    if let Some(k) = sys.exit_coordinate(x0) {
        return Err(left(0.0, k));
    }

    let steps = cfg.steps();
    let mut traj = OdeTrajectory {
        times: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
    };
    traj.times.push(0.0);
    traj.positions.push(x0.to_vec());
    traj.velocities.push(v0.to_vec());

    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let mut a = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let (mut xs, mut vs) = (vec![0.0; n], vec![0.0; n]);
    let mut vel = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];

    for i in 0..steps {
        let t = cfg.time(i);
        let h = cfg.time(i + 1) - t;

        vel[0].copy_from_slice(&v);
        sys.acceleration(&x, &v, &mut a[0]);
        for (stage, c) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            axpy(&x, c * h, &vel[stage - 1], &mut xs);
            axpy(&v, c * h, &a[stage - 1], &mut vs);
            if let Some(k) = sys.exit_coordinate(&xs) {
                return Err(left(t + c * h, k));
            }
            vel[stage].copy_from_slice(&vs);
            sys.acceleration(&xs, &vs, &mut a[stage]);
        }
        for k in 0..n {
            x[k] += h / 6.0 * (vel[0][k] + 2.0 * vel[1][k] + 2.0 * vel[2][k] + vel[3][k]);
            v[k] += h / 6.0 * (a[0][k] + 2.0 * a[1][k] + 2.0 * a[2][k] + a[3][k]);
        }
        let t_next = cfg.time(i + 1);
        if let Some(k) = sys.exit_coordinate(&x) {
            return Err(left(t_next, k));
        }
        traj.times.push(t_next);
        traj.positions.push(x.clone());
        traj.velocities.push(v.clone());
    }
    Ok(traj)
}

/// RK4 on the coupled system; any initial velocity is accepted.
pub fn integrate_coupled(
    p0: &SimplexPoint,
    v0: &TangentVector,
    cfg: &IntegratorConfig,
) -> Result<OdeTrajectory> {
    rk4(&CoupledSystem { n: p0.dim() }, p0.theta(), v0.v(), cfg)
}

/// RK4 on the decoupled scalar equations.
pub fn integrate_decoupled(y0: &[f64], z0: &[f64], cfg: &IntegratorConfig) -> Result<OdeTrajectory> {
    if let Some(y) = y0.iter().find(|y| !(**y > 0.0)) {
        return Err(Error::NonpositiveInitialDensity { value: *y });
    }
    rk4(&DecoupledSystem { n: y0.len() }, y0, z0, cfg)
}

/// `sum_{k=1}^{n+1} theta_k'^2 / theta_k` for a coupled-system state.
pub fn coupled_speed(x: &[f64], v: &[f64]) -> f64 {
    let last = 1.0 - x.iter().sum::<f64>();
    let vl: f64 = -v.iter().sum::<f64>();
    x.iter().zip(v).map(|(t, z)| z * z / t).sum::<f64>() + vl * vl / last
}
