mod density;
mod ladder;
mod moments;
mod oracle;
mod simplex;

pub use density::DensityGeodesic;
pub use ladder::PixelationConvergence;
pub use moments::Moments;
pub use oracle::OracleCompare;
pub use simplex::SimplexGeodesic;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use fisher_geodesics::{
    build_ladder, catalog, ellipse_param_n2, ellipsoid_tangent, BoxFunction, Error, PixelationLadder,
    SimplexPoint, TangentVector,
};

use crate::config::{Config, ConfigError};
use crate::experiment::RunError;

/// The resolved configuration minus the output directory, echoed into JSON.
pub(crate) fn echo(cfg: &Config) -> BTreeMap<String, String> {
    let mut m = cfg.values().clone();
    m.remove("out");
    m
}

/// `count` evenly spaced times from `start` to `end` inclusive.
pub(crate) fn time_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let step = (end - start) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { end } else { start + i as f64 * step })
        .collect()
}

/// A catalog name or `file:PATH` holding a box descriptor.
pub(crate) fn box_function(cfg: &Config, key: &str) -> Result<BoxFunction, ConfigError> {
    let raw = cfg.string(key)?;
    if let Some(path) = raw.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(key, format!("cannot read {path}: {e}")))?;
        return BoxFunction::parse(&text).map_err(|e| ConfigError::new(key, e.to_string()));
    }
    catalog::lookup(&raw).ok_or_else(|| {
        let names: Vec<&str> = catalog::names().collect();
        ConfigError::new(
            key,
            format!("unknown catalog function `{raw}` (known: {}; or file:PATH)", names.join(", ")),
        )
    })
}

pub(crate) fn simplex_point(cfg: &Config, key: &str) -> Result<SimplexPoint, ConfigError> {
    SimplexPoint::new(cfg.reals(key)?).map_err(|e| ConfigError::new(key, e.to_string()))
}

fn is_barycenter_n2(p: &SimplexPoint) -> bool {
    p.dim() == 2 && p.barycentric().iter().all(|x| (x - 1.0 / 3.0).abs() <= 1e-12)
}

/// Unit velocities from `tau` (list), `w` (vectors) or a `tau_count` sweep.
pub(crate) fn directions(cfg: &Config, p: &SimplexPoint) -> Result<Vec<TangentVector>, RunError> {
    let tau_keys_set = cfg.is_set("tau");
    if cfg.is_set("w") {
        if tau_keys_set {
            return Err(ConfigError::new("tau", "set either tau or w, not both").into());
        }
        return cfg
            .vectors("w")?
            .iter()
            .map(|w| {
                if w.len() != p.dim() {
                    return Err(ConfigError::new(
                        "w",
                        format!("direction has {} entries, theta0 has {}", w.len(), p.dim()),
                    )
                    .into());
                }
                ellipsoid_tangent(p, w).map_err(RunError::from)
            })
            .collect();
    }
    let taus = if tau_keys_set {
        cfg.reals("tau")?
    } else {
        let count = cfg.count("tau_count", 1)?;
        (0..count).map(|k| 2.0 * PI * k as f64 / count as f64).collect()
    };
    if !is_barycenter_n2(p) {
        return Err(ConfigError::new(
            "tau",
            "tau parametrizes unit velocities at theta0 = 1/3,1/3 only; use w elsewhere",
        )
        .into());
    }
    Ok(taus
        .into_iter()
        .map(|tau| TangentVector::new(ellipse_param_n2(tau).to_vec()))
        .collect())
}

/// Builds a ladder, reporting violated input hypotheses against the offending key.
pub(crate) fn ladder(
    cfg: &Config,
    f0: &BoxFunction,
    g0: &BoxFunction,
    levels: &[u32],
    level_key: &str,
) -> Result<PixelationLadder, RunError> {
    if f0.dimension() != g0.dimension() {
        return Err(ConfigError::new(
            "g0",
            format!("dimension {} differs from f0 ({})", g0.dimension(), f0.dimension()),
        )
        .into());
    }
    let delta = if cfg.is_set("delta") {
        cfg.positive_real("delta")?
    } else {
        let min = f0.min_value();
        if !(min > 0.0) {
            return Err(ConfigError::new("f0", format!("density must be positive, minimum is {min}")).into());
        }
        min
    };
    build_ladder(f0, g0, levels, delta).map_err(|e| match e {
        Error::HypothesisViolation { condition } => {
            let field = if condition.contains("g0") {
                "g0"
            } else if condition == "delta > 0" || (condition == "f0 >= delta" && cfg.is_set("delta")) {
                "delta"
            } else {
                "f0"
            };
            ConfigError::new(field, format!("hypothesis violated: {condition}")).into()
        }
        Error::InvalidSpace { reason } => ConfigError::new(level_key, reason).into(),
        other => other.into(),
    })
}

/// Zero-padded frame file names with at least two digits.
pub(crate) fn frame_name(index: usize, count: usize, ext: &str) -> String {
    let width = count.saturating_sub(1).to_string().len().max(2);
    format!("frame_{index:0width$}.{ext}")
}
