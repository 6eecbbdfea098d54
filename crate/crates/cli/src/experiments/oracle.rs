use std::collections::BTreeMap;

use fisher_geodesics::ode::{rk4, system_by_name, SYSTEM_NAMES};
use fisher_geodesics::{GeodesicState, IntegratorConfig};
use serde::Serialize;

use super::{directions, echo, simplex_point};
use crate::config::{key, optional, Config, ConfigError, KeySpec};
use crate::experiment::{Experiment, RunError};
use crate::export::{json_artifact, numbered, real, Artifact, Format, Table};

/// RK4 on a geodesic system against the closed form.
pub struct OracleCompare;

const KEYS: &[KeySpec] = &[
    key("theta0", "1/3,1/3", "start point, free coordinates"),
    optional("tau", "ellipse angle of the unit velocity (barycenter of the 2-simplex)"),
    key("tau_count", "1", "unused unless neither tau nor w is set"),
    optional("w", "raw direction, scaled to unit speed"),
    key("system", "coupled", "coupled or decoupled"),
    key("step", "1e-3", "RK4 step"),
    key("t_end", "1", "final time"),
];

#[derive(Serialize)]
struct Doc {
    config: BTreeMap<String, String>,
    system: String,
    times: Vec<f64>,
    closed: Vec<Vec<f64>>,
    ode: Vec<Vec<f64>>,
    max_abs_diff: f64,
}

impl Experiment for OracleCompare {
    fn name(&self) -> &'static str {
        "oracle-compare"
    }

    fn about(&self) -> &'static str {
        "Compare RK4 on the geodesic equations with the closed form"
    }

    fn keys(&self) -> &'static [KeySpec] {
        KEYS
    }

    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError> {
        let p = simplex_point(cfg, "theta0")?;
        let n = p.dim();
        let dirs = directions(cfg, &p)?;
        let [v] = dirs.as_slice() else {
            return Err(ConfigError::new("w", format!("expected one direction, got {}", dirs.len())).into());
        };
        let name = cfg.string("system")?;
        let full = name == "decoupled";
        let (x0, v0) = if full {
            (p.barycentric(), v.full())
        } else {
            (p.theta().to_vec(), v.v().to_vec())
        };
        let sys = system_by_name(&name, x0.len()).ok_or_else(|| {
            ConfigError::new("system", format!("unknown system `{name}` (known: {})", SYSTEM_NAMES.join(", ")))
        })?;
        let step = cfg.positive_real("step")?;
        let t_end = cfg.positive_real("t_end")?;
        let icfg = IntegratorConfig::new(step, t_end).map_err(|e| ConfigError::new("step", e.to_string()))?;

        let traj = rk4(sys.as_ref(), &x0, &v0, &icfg)?;
        let state = GeodesicState::simplex(&p, v)?;
        let complete = |x: &[f64]| -> Vec<f64> {
            let mut x = x.to_vec();
            if !full {
                x.push(1.0 - x.iter().sum::<f64>());
            }
            x
        };
        let closed: Vec<Vec<f64>> = traj.times().iter().map(|t| state.density_values(*t)).collect();
        let ode: Vec<Vec<f64>> = traj.positions().iter().map(|x| complete(x)).collect();
        let diffs: Vec<f64> = closed
            .iter()
            .zip(&ode)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .collect();
        let max_abs_diff = diffs.iter().copied().fold(0.0, f64::max);

        Ok(match format {
            Format::Json => vec![json_artifact(
                "oracle.json",
                &Doc {
                    config: echo(cfg),
                    system: name,
                    times: traj.times().to_vec(),
                    closed,
                    ode,
                    max_abs_diff,
                },
            )],
            Format::Csv => {
                let header = [
                    vec!["t".to_string()],
                    numbered("closed", n + 1),
                    numbered("ode", n + 1),
                    vec!["max_abs_diff".to_string()],
                ]
                .concat();
                let mut t = Table::new(&header);
                for (i, s) in traj.times().iter().enumerate() {
                    t.row(
                        std::iter::once(real(*s))
                            .chain(closed[i].iter().chain(&ode[i]).map(|x| real(*x)))
                            .chain(std::iter::once(real(diffs[i]))),
                    );
                }
                let mut summary = Table::new(&["system", "step", "t_end", "max_abs_diff"]);
                summary.row([name, real(step), real(t_end), real(max_abs_diff)]);
                vec![t.finish("oracle.csv"), summary.finish("summary.csv")]
            }
        })
    }
}
