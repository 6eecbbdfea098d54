use serde::Serialize;
use thiserror::Error;

/// Errors raised by geometry, flow, pixelation and diagnostic routines.
///
/// The enum is serializable so front ends can emit it as structured output.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum Error {
    #[error("invalid measure space: {reason}")]
    InvalidSpace { reason: String },

    #[error("invalid catalog function: {reason}")]
    InvalidCatalogFunction { reason: String },

    #[error("invalid density: {reason}")]
    InvalidDensity { reason: String },

    #[error("invalid simplex point: {reason}")]
    InvalidPoint { reason: String },

    #[error("atom index {index} out of range 1..={max}")]
    InvalidAtom { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("initial density value {value} is not positive")]
    NonpositiveInitialDensity { value: f64 },

    #[error("density and velocity live on different spaces")]
    SpaceMismatch,

    #[error("velocity is not unit speed: integral of g^2/f = {energy}")]
    NotUnitSpeed { energy: f64 },

    #[error("velocity is not centered: integral of g = {mean}")]
    NotCentered { mean: f64 },

    #[error("velocity has degenerate Fisher energy {energy}")]
    DegenerateVelocity { energy: f64 },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("trajectory touches the simplex boundary: coordinate {coordinate} at t = {time}")]
    BoundaryTouch { coordinate: usize, time: f64 },

    #[error("integration left the domain at t = {time} (coordinate {coordinate})")]
    LeftDomain { time: f64, coordinate: usize },

    #[error("need at least {required} points, got {actual}")]
    InsufficientPoints { required: usize, actual: usize },

    #[error("hypothesis violated: {condition}")]
    HypothesisViolation { condition: String },

    #[error("invalid integrator configuration: {reason}")]
    InvalidIntegrator { reason: String },

    #[error("invalid test function: {reason}")]
    InvalidTestFunction { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
