//! The experiment trait and the registry the command line is built from.

use std::fmt;

use fisher_geodesics::Error;

use crate::config::{Config, ConfigError, KeySpec};
use crate::experiments::{
    DensityGeodesic, Moments, OracleCompare, PixelationConvergence, SimplexGeodesic,
};
use crate::export::{Artifact, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Domain(Error),
    Io { path: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Domain(_) => 3,
            RunError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Domain(e) => {
                let json = serde_json::to_string(e).expect("errors serialize");
                write!(f, "{json}")
            }
            RunError::Io { path, message } => write!(f, "cannot write {path}: {message}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Domain(e)
    }
}

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    fn keys(&self) -> &'static [KeySpec];

    /// Produces every output file in memory; nothing is written on failure.
    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError>;
}

static REGISTRY: &[&dyn Experiment] = &[
    &SimplexGeodesic,
    &DensityGeodesic,
    &PixelationConvergence,
    &Moments,
    &OracleCompare,
];

pub fn registry() -> &'static [&'static dyn Experiment] {
    REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static dyn Experiment> {
    REGISTRY.iter().find(|e| e.name() == name).copied()
}
