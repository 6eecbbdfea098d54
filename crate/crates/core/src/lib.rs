//! Closed-form Fisher-Rao geodesics of probability densities.
//!
//! Densities on a finite weighted space follow `f(x,t) = alpha(x) cos^2(t/2 - beta(x))`
//! once an initial density `f0 > 0` and a unit-speed velocity `g0` are fixed. The
//! same formula covers the open probability simplex (counting measure on `n + 1`
//! atoms) and dyadic pixelations of densities on `[0,1)^m`.
//!
//! Module map:
//! - [`grid`], [`measure`], [`boxfn`], [`catalog`]: spaces, densities and piecewise-constant inputs
//! - [`simplex`]: the Fisher metric on the simplex, its inverse, Christoffel symbols, lengths
//! - [`geodesic`]: the closed-form flow
//! - [`ode`]: RK4 oracles for the coupled and decoupled geodesic systems
//! - [`pixelation`]: dyadic ladders and weak-convergence errors
//! - [`stats`]: moment curves and conic classification

pub mod boxfn;
pub mod catalog;
pub mod error;
pub mod geodesic;
pub mod grid;
pub mod measure;
pub mod ode;
pub mod pixelation;
pub mod simplex;
pub mod stats;

pub use boxfn::{cell_average_projection, AxisBox, BoxFunction, BoxPiece};
pub use error::{Error, Result};
pub use geodesic::{
    density_at, ellipse_param_n2, ellipsoid_tangent, evaluate_scalar, geodesic_flow,
    normalize_velocity, simplex_trajectory, solve_scalar_ivp, speed_density_at, GeodesicState,
    ScalarSample, UnitVelocity,
};
pub use grid::DyadicGrid;
pub use measure::{integrate, FiniteDensity, FiniteMeasureSpace, SignedFunction, Space};
pub use ode::{integrate_coupled, integrate_decoupled, IntegratorConfig, OdeTrajectory};
pub use pixelation::{
    alpha_sequence, build_ladder, three_term_errors, weak_error, PixelationLadder, TestFunction,
};
pub use simplex::{
    christoffel, euclidean_length, fisher_inverse, fisher_length, fisher_matrix,
    geodesic_residual_coupled, geodesic_residual_decoupled, metric_inner, rank_one_diag_det,
    rank_one_diag_inverse, score, score_covariance, MetricMatrix, SimplexPoint, TangentVector,
};
pub use stats::{classify_conic, moments, ConicFit, ConicKind, MomentCurve};
