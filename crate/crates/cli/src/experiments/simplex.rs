use fisher_geodesics::{simplex_trajectory, Error, GeodesicState};

use super::{directions, echo, simplex_point, time_grid};
use crate::config::{key, optional, Config, KeySpec};
use crate::experiment::{Experiment, RunError};
use crate::export::{numbered, real, Artifact, Format, Table, TrajectoryDoc};

/// Closed-form trajectories on the simplex from one start point.
pub struct SimplexGeodesic;

const KEYS: &[KeySpec] = &[
    key("theta0", "1/3,1/3", "start point, free coordinates"),
    optional("tau", "ellipse angles of the unit velocities (barycenter of the 2-simplex)"),
    key("tau_count", "12", "evenly spaced ellipse angles when neither tau nor w is set"),
    optional("w", "raw directions separated by `;`, each scaled to unit speed"),
    key("t_end", "pi/2", "final time"),
    key("samples", "100", "samples per trajectory, endpoints included"),
    key("on_boundary", "truncate", "truncate or error when a trajectory reaches the boundary"),
];

impl Experiment for SimplexGeodesic {
    fn name(&self) -> &'static str {
        "simplex-geodesic"
    }

    fn about(&self) -> &'static str {
        "Sample closed-form geodesics of the probability simplex"
    }

    fn keys(&self) -> &'static [KeySpec] {
        KEYS
    }

    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError> {
        let p = simplex_point(cfg, "theta0")?;
        let n = p.dim();
        let t_end = cfg.positive_real("t_end")?;
        let samples = cfg.count("samples", 2)?;
        let truncate = cfg.choice("on_boundary", &["truncate", "error"])? == "truncate";
        let dirs = directions(cfg, &p)?;
        let times = time_grid(0.0, t_end, samples);

        let mut index = Table::new(
            &[vec!["index".to_string()], numbered("v", n), vec!["samples".to_string()]].concat(),
        );
        let mut out = Vec::new();
        for (i, v) in dirs.iter().enumerate() {
            let kept: Vec<f64> = match simplex_trajectory(&p, v, &times) {
                Ok(_) => times.clone(),
                Err(Error::BoundaryTouch { time, .. }) if truncate => {
                    times.iter().copied().filter(|t| *t < time).collect()
                }
                Err(e) => return Err(e.into()),
            };
            index.row(
                std::iter::once(i.to_string())
                    .chain(v.v().iter().map(|x| real(*x)))
                    .chain(std::iter::once(kept.len().to_string())),
            );
            let state = GeodesicState::simplex(&p, v)?;
            match format {
                Format::Csv => {
                    let mut t = Table::new(&[vec!["t".to_string()], numbered("theta", n)].concat());
                    for &s in &kept {
                        let x = state.density_values(s);
                        t.row(std::iter::once(real(s)).chain(x[..n].iter().map(|y| real(*y))));
                    }
                    out.push(t.finish(format!("trajectory_{i:02}.csv")));
                }
                Format::Json => {
                    let frames: Vec<(f64, Vec<f64>)> =
                        kept.iter().map(|&s| (s, state.density_values(s))).collect();
                    let doc = TrajectoryDoc::new(echo(cfg), &state, &frames);
                    out.push(Artifact::new(format!("trajectory_{i:02}.json"), doc.to_json()));
                }
            }
        }
        out.push(index.finish("directions.csv"));
        Ok(out)
    }
}
