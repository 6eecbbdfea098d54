//! Named piecewise-constant initial data.
//!
//! The uniform densities and the `g0*` velocities transport the uniform
//! density towards `4·1[0,1/4]` (1D) or `16·1[0,1/4]^2` (2D). The `misaligned_*`
//! entries have breakpoints at 1/3 and 2/3, which no dyadic grid resolves, and
//! serve as the convergence benchmark.

use crate::boxfn::BoxFunction;

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> BoxFunction,
}

impl CatalogEntry {
    pub fn build(&self) -> BoxFunction {
        (self.build)()
    }
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "uniform1d",
        description: "f = 1 on [0,1)",
        build: uniform1d,
    },
    CatalogEntry {
        name: "uniform2d",
        description: "f = 1 on [0,1)^2",
        build: uniform2d,
    },
    CatalogEntry {
        name: "g01_1d",
        description: "2 on [0,1/8), -2 on [1/8,1/4)",
        build: g01_1d,
    },
    CatalogEntry {
        name: "g02_1d",
        description: "+-2 alternating on sixteenths of [0,1/4)",
        build: g02_1d,
    },
    CatalogEntry {
        name: "g01_2d",
        description: "4 on [0,1/4)x[0,1/8), -4 on [0,1/4)x[1/8,1/4)",
        build: g01_2d,
    },
    CatalogEntry {
        name: "g02_2d",
        description: "+-4 checkerboard of eighth-squares on [0,1/4)^2",
        build: g02_2d,
    },
    CatalogEntry {
        name: "g03_2d",
        description: "+-4 checkerboard of sixteenth-squares on [0,1/4)^2",
        build: g03_2d,
    },
    CatalogEntry {
        name: "misaligned_f0_1d",
        description: "density 1, 1/2, 1/2, 3/2 on [0,1/3), [1/3,1/2), [1/2,2/3), [2/3,1)",
        build: misaligned_f0_1d,
    },
    CatalogEntry {
        name: "misaligned_g0_1d",
        description: "unit velocity for misaligned_f0_1d: -5/4, -7/16, 5/16, 21/16",
        build: misaligned_g0_1d,
    },
    CatalogEntry {
        name: "thirds_g0_1d",
        description: "unit velocity for uniform1d: (1, 1, -2)/sqrt(2) on thirds",
        build: thirds_g0_1d,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.name)
}

pub fn lookup(name: &str) -> Option<BoxFunction> {
    ENTRIES.iter().find(|e| e.name == name).map(CatalogEntry::build)
}

fn intervals(pieces: &[(f64, f64, f64)]) -> BoxFunction {
    let boxes: Vec<(f64, &[f64], &[f64])> = pieces
        .iter()
        .map(|(v, lo, hi)| (*v, std::slice::from_ref(lo), std::slice::from_ref(hi)))
        .collect();
    BoxFunction::from_boxes(1, &boxes).expect("built-in 1D catalog entry is a valid partition")
}

/// Squares inside `[0,1/4)^2` plus the zero-valued remainder of the unit square.
fn quarter_square(squares: Vec<(f64, [f64; 2], [f64; 2])>) -> BoxFunction {
    let q = 0.25;
    let mut owned: Vec<(f64, Vec<f64>, Vec<f64>)> = squares
        .into_iter()
        .map(|(v, lo, hi)| (v, lo.to_vec(), hi.to_vec()))
        .collect();
    owned.push((0.0, vec![q, 0.0], vec![1.0, 1.0]));
    owned.push((0.0, vec![0.0, q], vec![q, 1.0]));
    let boxes: Vec<(f64, &[f64], &[f64])> = owned
        .iter()
        .map(|(v, lo, hi)| (*v, lo.as_slice(), hi.as_slice()))
        .collect();
    BoxFunction::from_boxes(2, &boxes).expect("built-in 2D catalog entry is a valid partition")
}

fn uniform1d() -> BoxFunction {
    BoxFunction::constant(1, 1.0).expect("unit interval")
}

fn uniform2d() -> BoxFunction {
    BoxFunction::constant(2, 1.0).expect("unit square")
}

fn g01_1d() -> BoxFunction {
    intervals(&[(2.0, 0.0, 0.125), (-2.0, 0.125, 0.25), (0.0, 0.25, 1.0)])
}

fn g02_1d() -> BoxFunction {
    let s = 1.0 / 16.0;
    intervals(&[
        (2.0, 0.0, s),
        (-2.0, s, 2.0 * s),
        (2.0, 2.0 * s, 3.0 * s),
        (-2.0, 3.0 * s, 4.0 * s),
        (0.0, 0.25, 1.0),
    ])
}

fn g01_2d() -> BoxFunction {
    quarter_square(vec![
        (4.0, [0.0, 0.0], [0.25, 0.125]),
        (-4.0, [0.0, 0.125], [0.25, 0.25]),
    ])
}

fn g02_2d() -> BoxFunction {
    let e = 0.125;
    quarter_square(vec![
        (4.0, [0.0, 0.0], [e, e]),
        (4.0, [e, e], [0.25, 0.25]),
        (-4.0, [e, 0.0], [0.25, e]),
        (-4.0, [0.0, e], [e, 0.25]),
    ])
}

fn g03_2d() -> BoxFunction {
    let s = 1.0 / 16.0;
    let mut squares = Vec::with_capacity(16);
    for k1 in 0..4 {
        for k2 in 0..4 {
            let sign = if (k1 + k2) % 2 == 0 { 4.0 } else { -4.0 };
            let lo = [k1 as f64 * s, k2 as f64 * s];
            let hi = [(k1 + 1) as f64 * s, (k2 + 1) as f64 * s];
            squares.push((sign, lo, hi));
        }
    }
    quarter_square(squares)
}

fn misaligned_f0_1d() -> BoxFunction {
    let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
    intervals(&[(1.0, 0.0, a), (0.5, a, 0.5), (0.5, 0.5, b), (1.5, b, 1.0)])
}

fn misaligned_g0_1d() -> BoxFunction {
    let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
    intervals(&[
        (-1.25, 0.0, a),
        (-7.0 / 16.0, a, 0.5),
        (5.0 / 16.0, 0.5, b),
        (21.0 / 16.0, b, 1.0),
    ])
}

fn thirds_g0_1d() -> BoxFunction {
    let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    intervals(&[(s, 0.0, a), (s, a, b), (-2.0 * s, b, 1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxfn::common_refinement;

    fn fisher_energy(f: &BoxFunction, g: &BoxFunction) -> f64 {
        common_refinement(f, g)
            .unwrap()
            .iter()
            .map(|(r, fv, gv)| r.volume() * gv * gv / fv)
            .sum()
    }

    #[test]
    fn every_entry_builds() {
        for e in entries() {
            let f = e.build();
            assert!(f.dimension() == 1 || f.dimension() == 2, "{}", e.name);
        }
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn velocities_satisfy_hypotheses() {
        let cases = [
            ("uniform1d", "g01_1d"),
            ("uniform1d", "g02_1d"),
            ("uniform1d", "thirds_g0_1d"),
            ("uniform2d", "g01_2d"),
            ("uniform2d", "g02_2d"),
            ("uniform2d", "g03_2d"),
            ("misaligned_f0_1d", "misaligned_g0_1d"),
        ];
        for (f, g) in cases {
            let (f, g) = (lookup(f).unwrap(), lookup(g).unwrap());
            assert!((f.integral() - 1.0).abs() < 1e-15);
            assert!(g.integral().abs() < 1e-15);
            assert!((fisher_energy(&f, &g) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_d_velocities_share_kinetic_density() {
        let f = lookup("uniform2d").unwrap();
        for name in ["g01_2d", "g02_2d", "g03_2d"] {
            let g = lookup(name).unwrap();
            for (x, y) in [(0.01, 0.2), (0.24, 0.24), (0.1, 0.13), (0.3, 0.1), (0.1, 0.3)] {
                let inside = x < 0.25 && y < 0.25;
                let gv = g.evaluate(&[x, y]).unwrap();
                let fv = f.evaluate(&[x, y]).unwrap();
                assert_eq!(gv * gv / fv, if inside { 16.0 } else { 0.0 });
            }
        }
    }
}
