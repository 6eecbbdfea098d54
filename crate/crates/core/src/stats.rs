//! Moment curves of grid geodesics and conic classification of simplex trajectories.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::GeodesicState;
use crate::grid::DyadicGrid;

/// Relative discriminant and collinearity cutoff.
pub const CONIC_CUTOFF: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurve {
    pub times: Vec<f64>,
    /// `mean[i][a]`: mean of coordinate `a` at `times[i]`.
    pub mean: Vec<Vec<f64>>,
    pub variance: Vec<Vec<f64>>,
}

impl MomentCurve {
    pub fn dimension(&self) -> usize {
        self.mean.first().map_or(0, Vec::len)
    }

    pub fn mean_axis(&self, axis: usize) -> Vec<f64> {
        self.mean.iter().map(|m| m[axis]).collect()
    }

    pub fn variance_axis(&self, axis: usize) -> Vec<f64> {
        self.variance.iter().map(|v| v[axis]).collect()
    }
}

fn state_grid(state: &GeodesicState) -> Result<DyadicGrid> {
    state.space().grid().copied().ok_or_else(|| Error::InvalidSpace {
        reason: "moments need a grid-based state".into(),
    })
}

/// Per-axis `(sum x_a h w, sum x_a^2 h w)` with cell centers as `x`.
fn first_two_moments(grid: &DyadicGrid, h: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = grid.dimension() as usize;
    let w = grid.cell_weight();
    let (mut m1, mut m2) = (vec![0.0; m], vec![0.0; m]);
    for (c, v) in h.iter().enumerate() {
        for (a, x) in grid.cell_center(c).into_iter().enumerate() {
            m1[a] += x * v;
            m2[a] += x * x * v;
        }
    }
    (
        m1.into_iter().map(|s| s * w).collect(),
        m2.into_iter().map(|s| s * w).collect(),
    )
}

/// Mean and coordinate-wise variance of `f(., t)` with cell centers as abscissae.
pub fn moments(state: &GeodesicState, times: &[f64]) -> Result<MomentCurve> {
    let grid = state_grid(state)?;
    let per_time: Vec<(Vec<f64>, Vec<f64>)> = times
        .par_iter()
        .map(|&t| {
            let (m1, m2) = first_two_moments(&grid, &state.density_values(t));
            let var = m1.iter().zip(&m2).map(|(a, b)| (b - a * a).max(0.0)).collect();
            (m1, var)
        })
        .collect();
    let (mean, variance) = per_time.into_iter().unzip();
    Ok(MomentCurve {
        times: times.to_vec(),
        mean,
        variance,
    })
}

/// `(A, B, C)` per axis with `mean(t) = A cos^2(t/2) + B sin^2(t/2) + C sin t`,
/// computed directly as the moments of `f0`, `g0^2/f0` and `g0`.
pub fn direct_mean_coefficients(state: &GeodesicState) -> Result<Vec<[f64; 3]>> {
    let grid = state_grid(state)?;
    let (a, _) = first_two_moments(&grid, state.f0());
    let (b, _) = first_two_moments(&grid, state.kinetic0());
    let (c, _) = first_two_moments(&grid, state.g0());
    Ok((0..a.len()).map(|i| [a[i], b[i], c[i]]).collect())
}

/// Least-squares fit of `A cos^2(t/2) + B sin^2(t/2) + C sin t` to one mean axis.
pub fn fit_mean_coefficients(curve: &MomentCurve, axis: usize) -> Result<[f64; 3]> {
    let n = curve.times.len();
    if n < 4 {
        return Err(Error::InsufficientPoints {
            required: 4,
            actual: n,
        });
    }
    let design = DMatrix::from_fn(n, 3, |i, k| {
        let t = curve.times[i];
        match k {
            0 => (0.5 * t).cos().powi(2),
            1 => (0.5 * t).sin().powi(2),
            _ => t.sin(),
        }
    });
    let rhs = DVector::from_vec(curve.mean_axis(axis));
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::HypothesisViolation {
            condition: format!("moment fit: {e}"),
        })?;
    Ok([sol[0], sol[1], sol[2]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConicKind {
    Ellipse,
    Line,
    Degenerate,
}

/// Result of [`classify_conic`].
///
/// For `Line`, `residual` is the RMS orthogonal distance to the best line in
/// input units. Otherwise it is the RMS algebraic residual of the unit-norm
/// conic in centered, RMS-scaled coordinates, where `coefficients` are
/// `(a, b, c, d, e, f)` of `a x^2 + b xy + c y^2 + d x + e y + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicFit {
    pub kind: ConicKind,
    pub residual: f64,
    pub coefficients: [f64; 6],
    /// `(b^2 - 4ac)` of the unit-norm coefficients.
    pub discriminant: f64,
}

pub fn classify_conic(points: &[[f64; 2]]) -> Result<ConicFit> {
    let n = points.len();
    if n < 6 {
        return Err(Error::InsufficientPoints {
            required: 6,
            actual: n,
        });
    }
    let inv_n = (n as f64).recip();
    let cx = points.iter().map(|p| p[0]).sum::<f64>() * inv_n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() * inv_n;
    let spread = (points
        .iter()
        .map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2))
        .sum::<f64>()
        * inv_n)
        .sqrt();
    if !(spread > 0.0) {
        return Ok(ConicFit {
            kind: ConicKind::Degenerate,
            residual: 0.0,
            coefficients: [0.0; 6],
            discriminant: 0.0,
        });
    }
    let scaled: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [(p[0] - cx) / spread, (p[1] - cy) / spread])
        .collect();

    // Scatter of the normalized cloud has trace one.
    let sxx = scaled.iter().map(|p| p[0] * p[0]).sum::<f64>() * inv_n;
    let syy = scaled.iter().map(|p| p[1] * p[1]).sum::<f64>() * inv_n;
    let sxy = scaled.iter().map(|p| p[0] * p[1]).sum::<f64>() * inv_n;
    let half_gap = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let mid = 0.5 * (sxx + syy);
    let (lmax, lmin) = (mid + half_gap, (mid - half_gap).max(0.0));
    if (lmin / lmax).sqrt() <= CONIC_CUTOFF {
        let (ux, uy) = if sxy.abs() > 0.0 || sxx >= syy {
            let (ux, uy) = (sxy, lmax - sxx);
            let norm = ux.hypot(uy);
            if norm > 0.0 {
                (ux / norm, uy / norm)
            } else {
                (1.0, 0.0)
            }
        } else {
            (0.0, 1.0)
        };
        // Normal direction is (-uy, ux).
        let rms = (scaled
            .iter()
            .map(|p| (-uy * p[0] + ux * p[1]).powi(2))
            .sum::<f64>()
            * inv_n)
            .sqrt();
        return Ok(ConicFit {
            kind: ConicKind::Line,
            residual: rms * spread,
            coefficients: [0.0, 0.0, 0.0, -uy, ux, 0.0],
            discriminant: 0.0,
        });
    }

    // sqrt(2) on the xy column makes the quadratic block rotation-orthogonal.
    let r2 = std::f64::consts::SQRT_2;
    let design = DMatrix::from_fn(n, 6, |i, k| {
        let [x, y] = scaled[i];
        match k {
            0 => x * x,
            1 => r2 * x * y,
            2 => y * y,
            3 => x,
            4 => y,
            _ => 1.0,
        }
    });
    let svd = design.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("six singular values");
    let row = v_t.row(idx);
    let coefficients = [row[0], r2 * row[1], row[2], row[3], row[4], row[5]];
    let [a, b, c, ..] = coefficients;
    let discriminant = b * b - 4.0 * a * c;
    let kind = if discriminant < -CONIC_CUTOFF {
        ConicKind::Ellipse
    } else {
        ConicKind::Degenerate
    };
    Ok(ConicFit {
        kind,
        residual: sigma * inv_n.sqrt(),
        coefficients,
        discriminant,
    })
}
