use std::collections::BTreeMap;

use fisher_geodesics::stats::{direct_mean_coefficients, fit_mean_coefficients};
use fisher_geodesics::{moments, Error, MomentCurve};
use serde::Serialize;

use super::{box_function, echo, ladder, time_grid};
use crate::config::{key, optional, Config, KeySpec};
use crate::experiment::{Experiment, RunError};
use crate::export::{json_artifact, numbered, real, Artifact, Format, Table};

/// Mean and variance curves of a pixelated geodesic.
pub struct Moments;

const KEYS: &[KeySpec] = &[
    key("f0", "uniform1d", "initial density: catalog name or file:PATH"),
    key("g0", "g01_1d", "initial velocity: catalog name or file:PATH"),
    key("level", "6", "dyadic level"),
    key("samples", "100", "number of times, endpoints included"),
    key("t_end", "2*pi", "last time"),
    optional("delta", "lower bound for f0 (defaults to its minimum)"),
];

/// `mean(t) = A cos^2(t/2) + B sin^2(t/2) + C sin t` for one axis.
#[derive(Serialize)]
struct Coefficients {
    axis: usize,
    fit: [f64; 3],
    direct: [f64; 3],
}

#[derive(Serialize)]
struct Doc {
    config: BTreeMap<String, String>,
    curve: MomentCurve,
    coefficients: Vec<Coefficients>,
}

impl Experiment for Moments {
    fn name(&self) -> &'static str {
        "moments"
    }

    fn about(&self) -> &'static str {
        "Mean and variance of f(., t) along a pixelated geodesic"
    }

    fn keys(&self) -> &'static [KeySpec] {
        KEYS
    }

    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError> {
        let f0 = box_function(cfg, "f0")?;
        let g0 = box_function(cfg, "g0")?;
        let level = cfg.count("level", 0)? as u32;
        let times = time_grid(0.0, cfg.positive_real("t_end")?, cfg.count("samples", 4)?);
        let ladder = ladder(cfg, &f0, &g0, &[level], "level")?;
        let lvl = ladder.level(level).expect("ladder holds the requested level");
        let state = lvl
            .state
            .as_ref()
            .ok_or(Error::DegenerateVelocity { energy: lvl.alpha })?;

        let curve = moments(state, &times)?;
        let direct = direct_mean_coefficients(state)?;
        let coefficients = direct
            .iter()
            .enumerate()
            .map(|(axis, d)| {
                Ok(Coefficients {
                    axis: axis + 1,
                    fit: fit_mean_coefficients(&curve, axis)?,
                    direct: *d,
                })
            })
            .collect::<fisher_geodesics::Result<Vec<_>>>()?;

        Ok(match format {
            Format::Json => vec![json_artifact(
                "moments.json",
                &Doc {
                    config: echo(cfg),
                    curve,
                    coefficients,
                },
            )],
            Format::Csv => {
                let d = curve.dimension();
                let mut t =
                    Table::new(&[vec!["t".to_string()], numbered("mean", d), numbered("var", d)].concat());
                for (i, s) in curve.times.iter().enumerate() {
                    t.row(
                        std::iter::once(real(*s))
                            .chain(curve.mean[i].iter().map(|x| real(*x)))
                            .chain(curve.variance[i].iter().map(|x| real(*x))),
                    );
                }
                let mut c = Table::new(&["axis", "fit_a", "fit_b", "fit_c", "direct_a", "direct_b", "direct_c"]);
                for k in &coefficients {
                    c.row(
                        std::iter::once(k.axis.to_string())
                            .chain(k.fit.iter().chain(&k.direct).map(|x| real(*x))),
                    );
                }
                vec![t.finish("moments.csv"), c.finish("coefficients.csv")]
            }
        })
    }
}
