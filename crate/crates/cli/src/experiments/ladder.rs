use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use fisher_geodesics::pixelation::{test_functions, WeakProbe, REFERENCE_OFFSET};
use rayon::prelude::*;
use serde::Serialize;

use super::{box_function, echo, ladder};
use crate::config::{key, optional, Config, ConfigError, KeySpec};
use crate::experiment::{Experiment, RunError};
use crate::export::{json_artifact, real, Artifact, Format, Table};

/// Renormalizers and weak errors along a pixelation ladder.
pub struct PixelationConvergence;

const KEYS: &[KeySpec] = &[
    key("f0", "misaligned_f0_1d", "initial density: catalog name or file:PATH"),
    key("g0", "misaligned_g0_1d", "initial velocity: catalog name or file:PATH"),
    key("levels", "3-8", "levels as a range 3-8 or a list 3,5,7"),
    optional("delta", "lower bound for f0 (defaults to its minimum)"),
    optional("reference_level", "level of the reference grid (defaults to the finest level + 4)"),
];

/// One ladder row; weak errors are maxima over the test-function catalog.
#[derive(Debug, Serialize)]
struct Row {
    j: u32,
    alpha_j: f64,
    degenerate: bool,
    e_f: f64,
    e_g: Option<f64>,
    e_q: Option<f64>,
    weak_error_t0: Option<f64>,
    weak_error_tpi2: Option<f64>,
}

#[derive(Serialize)]
struct Doc {
    config: BTreeMap<String, String>,
    reference_level: u32,
    test_functions: Vec<String>,
    levels: Vec<Row>,
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

impl Experiment for PixelationConvergence {
    fn name(&self) -> &'static str {
        "pixelation-convergence"
    }

    fn about(&self) -> &'static str {
        "Ladder summary: renormalizers and weak errors per level"
    }

    fn keys(&self) -> &'static [KeySpec] {
        KEYS
    }

    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError> {
        let f0 = box_function(cfg, "f0")?;
        let g0 = box_function(cfg, "g0")?;
        let levels = cfg.levels("levels")?;
        let ladder = ladder(cfg, &f0, &g0, &levels, "levels")?;
        let j_ref = if cfg.is_set("reference_level") {
            cfg.count("reference_level", 0)? as u32
        } else {
            ladder.max_level() + REFERENCE_OFFSET
        };
        let probe = WeakProbe::new(&ladder, j_ref).map_err(|e| ConfigError::new("reference_level", e.to_string()))?;
        let phis = test_functions(ladder.dimension());

        let rows = ladder
            .levels()
            .par_iter()
            .map(|lvl| {
                let j = lvl.level;
                let terms = phis
                    .iter()
                    .map(|phi| probe.three_term(j, phi))
                    .collect::<fisher_geodesics::Result<Vec<_>>>()?;
                let e_f = max_of(terms.iter().map(|t| t.e_f));
                let e_g = terms.iter().map(|t| t.e_g).collect::<Option<Vec<_>>>().map(|v| max_of(v.into_iter()));
                let e_q = terms.iter().map(|t| t.e_q).collect::<Option<Vec<_>>>().map(|v| max_of(v.into_iter()));
                let weak = |t: f64| -> fisher_geodesics::Result<Option<f64>> {
                    Ok(probe.weak_errors(j, t, &phis)?.map(|v| max_of(v.into_iter())))
                };
                Ok(Row {
                    j,
                    alpha_j: lvl.alpha,
                    degenerate: lvl.is_degenerate(),
                    e_f,
                    e_g,
                    e_q,
                    weak_error_t0: weak(0.0)?,
                    weak_error_tpi2: weak(FRAC_PI_2)?,
                })
            })
            .collect::<fisher_geodesics::Result<Vec<Row>>>()?;

        Ok(vec![match format {
            Format::Json => json_artifact(
                "ladder.json",
                &Doc {
                    config: echo(cfg),
                    reference_level: j_ref,
                    test_functions: phis.iter().map(|p| p.label()).collect(),
                    levels: rows,
                },
            ),
            Format::Csv => {
                let mut t = Table::new(&[
                    "j",
                    "alpha_j",
                    "degenerate",
                    "e_f",
                    "e_g",
                    "e_q",
                    "weak_error_t0",
                    "weak_error_tpi2",
                ]);
                for r in &rows {
                    t.row([
                        r.j.to_string(),
                        real(r.alpha_j),
                        r.degenerate.to_string(),
                        real(r.e_f),
                        opt(r.e_g),
                        opt(r.e_q),
                        opt(r.weak_error_t0),
                        opt(r.weak_error_tpi2),
                    ]);
                }
                t.finish("ladder.csv")
            }
        }])
    }
}
