use fisher_geodesics::Error;
use rayon::prelude::*;

use super::{box_function, echo, frame_name, ladder, time_grid};
use crate::config::{key, optional, Config, KeySpec};
use crate::experiment::{Experiment, RunError};
use crate::export::{numbered, real, Artifact, Format, Table, TrajectoryDoc};

/// Frames of the discrete geodesic on one dyadic level.
pub struct DensityGeodesic;

const KEYS: &[KeySpec] = &[
    key("f0", "uniform1d", "initial density: catalog name or file:PATH"),
    key("g0", "g01_1d", "initial velocity: catalog name or file:PATH"),
    key("level", "6", "dyadic level"),
    key("frames", "12", "number of frames"),
    key("t_start", "0", "first frame time"),
    key("t_end", "pi", "last frame time"),
    optional("delta", "lower bound for f0 (defaults to its minimum)"),
];

impl Experiment for DensityGeodesic {
    fn name(&self) -> &'static str {
        "density-geodesic"
    }

    fn about(&self) -> &'static str {
        "Frames of a pixelated density geodesic"
    }

    fn keys(&self) -> &'static [KeySpec] {
        KEYS
    }

    fn run(&self, cfg: &Config, format: Format) -> Result<Vec<Artifact>, RunError> {
        let f0 = box_function(cfg, "f0")?;
        let g0 = box_function(cfg, "g0")?;
        let level = cfg.count("level", 0)? as u32;
        let count = cfg.count("frames", 1)?;
        let times = time_grid(cfg.real("t_start")?, cfg.real("t_end")?, count);
        let ladder = ladder(cfg, &f0, &g0, &[level], "level")?;
        let lvl = ladder.level(level).expect("ladder holds the requested level");
        let state = lvl
            .state
            .as_ref()
            .ok_or(Error::DegenerateVelocity { energy: lvl.alpha })?;

        let frames: Vec<(f64, Vec<f64>)> = times
            .par_iter()
            .map(|&t| (t, state.density_values(t)))
            .collect();

        Ok(match format {
            Format::Json => {
                let doc = TrajectoryDoc::new(echo(cfg), state, &frames);
                vec![Artifact::new("geodesic.json", doc.to_json())]
            }
            Format::Csv => {
                let grid = lvl.grid;
                let m = grid.dimension() as usize;
                let header =
                    [vec!["cell_index".to_string()], numbered("x_center", m), vec!["f_value".to_string()]]
                        .concat();
                let mut out: Vec<Artifact> = frames
                    .par_iter()
                    .enumerate()
                    .map(|(i, (_, values))| {
                        let mut t = Table::new(&header);
                        for (c, f) in values.iter().enumerate() {
                            t.row(
                                std::iter::once(c.to_string())
                                    .chain(grid.cell_center(c).into_iter().map(real))
                                    .chain(std::iter::once(real(*f))),
                            );
                        }
                        t.finish(frame_name(i, count, "csv"))
                    })
                    .collect();
                let mut index = Table::new(&["frame", "t"]);
                for (i, (t, _)) in frames.iter().enumerate() {
                    index.row([i.to_string(), real(*t)]);
                }
                out.push(index.finish("frame_times.csv"));
                out
            }
        })
    }
}
