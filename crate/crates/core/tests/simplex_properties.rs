mod common;

use common::{random_direction, random_point, random_unit_velocity, rng};
use fisher_geodesics::geodesic::GeodesicState;
use fisher_geodesics::simplex::compact_set_constant;
use fisher_geodesics::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;

fn to_nalgebra(m: &MetricMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.n(), m.n(), m.as_slice())
}

#[test]
fn metric_is_positive_definite() {
    let mut r = rng(1);
    for _ in 0..1000 {
        let n = r.random_range(1..12);
        let p = random_point(&mut r, n, 1e-4);
        let u = random_direction(&mut r, n);
        assert!(metric_inner(&p, &u, &u) > 0.0);
    }
}

#[test]
fn inverse_times_matrix_is_identity() {
    let mut r = rng(2);
    for n in 1..=50 {
        for _ in 0..4 {
            let p = random_point(&mut r, n, 1e-3);
            let prod = fisher_matrix(&p).mul(&fisher_inverse(&p));
            assert!(prod.distance_to_identity() <= 1e-10, "n = {n}");
        }
    }
}

#[test]
fn determinant_lemma_matches_lu() {
    let mut r = rng(3);
    for _ in 0..200 {
        let n = r.random_range(1..=20);
        let c: Vec<f64> = (0..n).map(|_| r.random_range(0.1..5.0)).collect();
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + c[i] } else { 1.0 });
        let lu = a.clone().lu().determinant();
        let lemma = rank_one_diag_det(&c);
        assert!(((lemma - lu) / lu).abs() <= 1e-10);
        let inv = to_nalgebra(&rank_one_diag_inverse(&c));
        let solved = a.clone().lu().try_inverse().unwrap();
        assert!((inv - solved).abs().max() <= 1e-10);
    }
}

#[test]
fn lemma_inverse_of_one_two_three() {
    let c = [1.0, 2.0, 3.0];
    let a = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 + c[i] } else { 1.0 });
    let inv = to_nalgebra(&rank_one_diag_inverse(&c));
    assert!((inv * a - DMatrix::identity(3, 3)).abs().max() <= 1e-12);
}

#[test]
fn score_is_centered_and_covariance_is_fisher() {
    let mut r = rng(4);
    for _ in 0..100 {
        let n = r.random_range(1..=10);
        let p = random_point(&mut r, n, 1e-3);
        let mut mean = vec![0.0; n];
        for l in 1..=n + 1 {
            let s = score(l, &p).unwrap();
            for j in 0..n {
                mean[j] += s[j] * p.coordinate(l - 1);
            }
        }
        assert!(mean.iter().all(|m| m.abs() <= 1e-13), "{mean:?}");
        let cov = score_covariance(&p);
        let fisher = fisher_matrix(&p);
        let scale = fisher.as_slice().iter().fold(1.0f64, |a, b| a.max(b.abs()));
        assert!(cov.max_abs_diff(&fisher) <= 1e-12 * scale);
    }
}

#[test]
fn fixed_score_covariance_examples() {
    let p = SimplexPoint::new(vec![0.2, 0.3, 0.1]).unwrap();
    assert!(score_covariance(&p).max_abs_diff(&fisher_matrix(&p)) <= 1e-12);
}

#[test]
fn metric_inner_matches_matrix_product() {
    let mut r = rng(5);
    for _ in 0..200 {
        let n = r.random_range(1..10);
        let p = random_point(&mut r, n, 1e-3);
        let u = random_direction(&mut r, n);
        let w = random_direction(&mut r, n);
        let direct = metric_inner(&p, &u, &w);
        let oracle = fisher_matrix(&p).quad_form(u.v(), w.v());
        assert!((direct - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        assert_eq!(direct, metric_inner(&p, &w, &u));
    }
}

/// `Gamma_{ij,l} = (d_i g_jl + d_j g_li - d_l g_ij) / 2` raised with the inverse metric.
fn christoffel_oracle(p: &SimplexPoint, k: usize, i: usize, j: usize) -> f64 {
    let n = p.dim();
    let th = p.theta();
    let inv_last2 = p.theta_last().powi(-2);
    let dg = |a: usize, b: usize, by: usize| {
        let diag = if a == b && b == by { th[by].powi(-2) } else { 0.0 };
        inv_last2 - diag
    };
    let inv = fisher_inverse(p);
    (0..n)
        .map(|l| {
            let first = 0.5 * (dg(j, l, i) + dg(l, i, j) - dg(i, j, l));
            inv.get(k, l) * first
        })
        .sum()
}

#[test]
fn christoffel_matches_first_kind_oracle() {
    let mut r = rng(6);
    for _ in 0..50 {
        let n = r.random_range(1..7);
        let p = random_point(&mut r, n, 1e-2);
        let g = christoffel(&p);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let o = christoffel_oracle(&p, k, i, j);
                    assert!((g.get(k, i, j) - o).abs() <= 1e-10 * o.abs().max(1.0));
                    assert_eq!(g.get(k, i, j), g.get(k, j, i));
                }
            }
        }
    }
}

#[test]
fn christoffel_quadratic_form_is_coupled_force() {
    let mut r = rng(7);
    for _ in 0..200 {
        let n = r.random_range(1..8);
        let p = random_point(&mut r, n, 1e-2);
        let u = random_direction(&mut r, n);
        let g = christoffel(&p);
        let zero = vec![0.0; n];
        let force = geodesic_residual_coupled(&p, &u, &zero).unwrap();
        for (k, f) in force.iter().enumerate() {
            let q = 2.0 * g.contract(k, u.v());
            assert!((q - f).abs() <= 1e-12 * f.abs().max(1.0), "{q} vs {f}");
        }
    }
}

fn sampled_geodesic(
    p: &SimplexPoint,
    v: &TangentVector,
    t_end: f64,
    samples: usize,
) -> (Vec<(SimplexPoint, TangentVector)>, f64) {
    let state = GeodesicState::simplex(p, v).unwrap();
    let n = p.dim();
    let dt = t_end / (samples - 1) as f64;
    let out = (0..samples)
        .map(|i| {
            let t = i as f64 * dt;
            let x = state.density_values(t);
            let xd = state.velocity_values(t);
            (
                SimplexPoint::new(x[..n].to_vec()).unwrap(),
                TangentVector::new(xd[..n].to_vec()),
            )
        })
        .collect();
    (out, dt)
}

#[test]
fn closed_form_satisfies_both_systems() {
    let mut r = rng(8);
    for _ in 0..30 {
        let n = r.random_range(1..8);
        let p = random_point(&mut r, n, 0.02);
        let v = random_unit_velocity(&mut r, &p);
        let state = GeodesicState::simplex(&p, &v).unwrap();
        let t_exit = common::exit_time(&p, &v);
        for i in 0..40 {
            let t = (t_exit - 0.05).min(std::f64::consts::PI) * i as f64 / 40.0;
            let x = state.density_values(t);
            let xd = state.velocity_values(t);
            let xdd = state.acceleration_values(t);
            let point = SimplexPoint::new(x[..n].to_vec()).unwrap();
            let vel = TangentVector::new(xd[..n].to_vec());
            let coupled = geodesic_residual_coupled(&point, &vel, &xdd[..n]).unwrap();
            assert!(coupled.iter().all(|c| c.abs() <= 1e-10), "{coupled:?}");
            for k in 0..=n {
                assert!(geodesic_residual_decoupled(x[k], xd[k], xdd[k]).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn unit_speed_geodesic_length_is_elapsed_time() {
    let p = SimplexPoint::new(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
    let v = TangentVector::new(ellipse_param_n2(1.0).to_vec());
    let (samples, dt) = sampled_geodesic(&p, &v, 1.2, 10_000);
    assert!((fisher_length(&samples, dt) - 1.2).abs() <= 1e-6);
}

/// Composite Simpson with Richardson extrapolation on two refinements.
fn dense_length(a: &[f64], b: &[f64]) -> f64 {
    let integrand = |s: f64| {
        let theta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect();
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let last = 1.0 - theta.iter().sum::<f64>();
        let dl: f64 = -d.iter().sum::<f64>();
        (theta.iter().zip(&d).map(|(t, z)| z * z / t).sum::<f64>() + dl * dl / last).sqrt()
    };
    let simpson = |m: usize| {
        let h = 1.0 / m as f64;
        let mut acc = integrand(0.0) + integrand(1.0);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * integrand(i as f64 * h);
        }
        acc * h / 3.0
    };
    let (coarse, fine) = (simpson(2000), simpson(4000));
    fine + (fine - coarse) / 15.0
}

#[test]
fn straight_segment_length_matches_dense_quadrature() {
    let a = [0.2, 0.5];
    let b = [0.6, 0.1];
    let samples_n = 20_001;
    let dt = 1.0 / (samples_n - 1) as f64;
    let samples: Vec<_> = (0..samples_n)
        .map(|i| {
            let s = i as f64 * dt;
            (
                SimplexPoint::new(vec![a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]).unwrap(),
                TangentVector::new(vec![b[0] - a[0], b[1] - a[1]]),
            )
        })
        .collect();
    assert!((fisher_length(&samples, dt) - dense_length(&a, &b)).abs() <= 1e-8);
}

#[test]
fn length_domination_both_ways() {
    let mut r = rng(9);
    for _ in 0..60 {
        let n = r.random_range(1..6);
        let p = random_point(&mut r, n, 0.05);
        let v = random_unit_velocity(&mut r, &p);
        let t_end = (common::exit_time(&p, &v) - 0.2).clamp(0.05, 1.0);
        let (samples, dt) = sampled_geodesic(&p, &v, t_end, 400);
        let lj = fisher_length(&samples, dt);
        let le = euclidean_length(&samples, dt);
        assert!(le <= lj + 1e-12);
        let delta = samples
            .iter()
            .map(|(x, _)| x.min_coordinate())
            .fold(f64::INFINITY, f64::min);
        assert!(lj <= compact_set_constant(n, delta) * le);
    }
}

proptest! {
    #![proptest_config(Config {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    })]

    #[test]
    fn inner_product_is_symmetric_bilinear(
        raw in prop::collection::vec(0.05f64..1.0, 4),
        u in prop::collection::vec(-1.0f64..1.0, 3),
        w in prop::collection::vec(-1.0f64..1.0, 3),
        a in -2.0f64..2.0,
    ) {
        let total: f64 = raw.iter().sum();
        let p = SimplexPoint::new(raw[..3].iter().map(|x| x / total).collect()).unwrap();
        let (u, w) = (TangentVector::new(u), TangentVector::new(w));
        let lhs = metric_inner(&p, &u.scaled(a), &w);
        let rhs = a * metric_inner(&p, &u, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        prop_assert_eq!(metric_inner(&p, &u, &w), metric_inner(&p, &w, &u));
    }

    #[test]
    fn ellipse_parametrization_is_on_the_unit_ellipse(tau in -10.0f64..10.0) {
        let [v1, v2] = ellipse_param_n2(tau);
        prop_assert!((v1 * v1 + v2 * v2 + v1 * v2 - 1.0 / 6.0).abs() <= 1e-14);
    }
}
