mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{exit_time, random_point, random_unit_velocity, rng};
use fisher_geodesics::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random normalized density and a unit velocity on a dyadic grid.
fn random_grid_state(r: &mut ChaCha8Rng, dimension: u32, level: u32) -> GeodesicState {
    let space: Space = DyadicGrid::new(dimension, level).unwrap().into();
    let len = space.len();
    let raw: Vec<f64> = (0..len).map(|_| r.random_range(0.2..2.0)).collect();
    let mass = space.integrate(&raw);
    let f0 = FiniteDensity::new(space.clone(), raw.iter().map(|x| x / mass).collect()).unwrap();
    let g: Vec<f64> = (0..len).map(|_| r.random_range(-1.0..1.0)).collect();
    let mean = space.integrate(&g);
    let g = SignedFunction::new(space, g.iter().map(|x| x - mean).collect()).unwrap();
    let v = normalize_velocity(&f0, &g).unwrap();
    geodesic_flow(&f0, &v).unwrap()
}

fn assert_conserved(state: &GeodesicState, times: impl Iterator<Item = f64>) {
    for t in times {
        let mass = density_at(state, t).mass();
        let speed = speed_density_at(state, t).mass();
        assert!((mass - 1.0).abs() <= 1e-12, "mass {mass} at t = {t}");
        assert!((speed - 1.0).abs() <= 1e-12, "speed {speed} at t = {t}");
    }
}

#[test]
fn mass_and_speed_are_conserved_on_grids() {
    let mut r = rng(11);
    for (dimension, level) in [(1, 3), (1, 6), (1, 8), (2, 3), (2, 5)] {
        for _ in 0..4 {
            let state = random_grid_state(&mut r, dimension, level);
            assert_conserved(&state, (0..100).map(|i| 2.0 * PI * i as f64 / 99.0));
        }
    }
}

#[test]
fn mass_and_speed_are_conserved_on_simplices() {
    let mut r = rng(12);
    for _ in 0..30 {
        let n = r.random_range(1..=10);
        let p = random_point(&mut r, n, 1e-3);
        let v = random_unit_velocity(&mut r, &p);
        let state = GeodesicState::simplex(&p, &v).unwrap();
        assert_conserved(&state, (0..100).map(|i| 7.0 * i as f64 / 99.0 - 1.0));
    }
}

#[test]
fn density_and_kinetic_split_the_energy() {
    let mut r = rng(13);
    let state = random_grid_state(&mut r, 1, 5);
    for i in 0..50 {
        let t = i as f64 * 0.13;
        let f = state.density_values(t);
        let k = state.kinetic_values(t);
        let fd = state.velocity_values(t);
        for x in 0..state.len() {
            assert!((f[x] + k[x] - state.alpha()[x]).abs() <= 1e-13 * state.alpha()[x]);
            assert!((fd[x] * fd[x] / f[x] - k[x]).abs() <= 1e-9 * state.alpha()[x]);
        }
    }
}

#[test]
fn flow_is_two_pi_periodic_and_reaches_the_kinetic_density_at_pi() {
    let mut r = rng(14);
    let state = random_grid_state(&mut r, 2, 3);
    for t in [0.0, 0.4, 1.7, 3.0] {
        let a = state.density_values(t);
        let b = state.density_values(t + 2.0 * PI);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12));
    }
    let at_pi = state.density_values(PI);
    for (x, q) in at_pi.iter().zip(state.kinetic0()) {
        assert!((x - q).abs() <= 1e-12);
    }
}

#[test]
fn closed_form_solves_the_scalar_equation() {
    let mut r = rng(15);
    for _ in 0..100 {
        let y0 = r.random_range(0.01..3.0);
        let z0 = r.random_range(-3.0..3.0);
        let (alpha, beta) = solve_scalar_ivp(y0, z0).unwrap();
        let start = evaluate_scalar(alpha, beta, 0.0);
        assert!((start.y - y0).abs() <= 1e-13 * alpha);
        assert!((start.ydot - z0).abs() <= 1e-13 * alpha);
        for i in 0..20 {
            let s = evaluate_scalar(alpha, beta, i as f64 * 0.3);
            assert!(geodesic_residual_decoupled(s.y, s.ydot, s.yddot).abs() <= 1e-12 * alpha * alpha);
        }
    }
}

#[test]
fn normalize_is_scale_invariant() {
    let mut r = rng(16);
    let space: Space = DyadicGrid::new(1, 4).unwrap().into();
    let f0 = FiniteDensity::new(space.clone(), vec![1.0; 16]).unwrap();
    let mut g: Vec<f64> = (0..16).map(|_| r.random_range(-1.0..1.0)).collect();
    let mean = g.iter().sum::<f64>() / 16.0;
    g.iter_mut().for_each(|x| *x -= mean);
    let g = SignedFunction::new(space, g).unwrap();
    let base = normalize_velocity(&f0, &g).unwrap();
    for c in [1e-3, 0.5, 7.0, 1e4] {
        let scaled = normalize_velocity(&f0, &g.scaled(c)).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }
    }
    assert!(matches!(
        normalize_velocity(&f0, &g.scaled(-2.0)),
        Ok(v) if (v.values()[0] + base.values()[0]).abs() <= 1e-13
    ));
}

#[test]
fn orthogonal_velocity_has_pythagorean_mixture() {
    // For t = pi/2 the density is the average of f0 and g0^2/f0 plus g0.
    let mut r = rng(17);
    let state = random_grid_state(&mut r, 1, 4);
    let f = state.density_values(FRAC_PI_2);
    for x in 0..state.len() {
        let expect = 0.5 * (state.f0()[x] + state.kinetic0()[x]) + state.g0()[x];
        assert!((f[x] - expect).abs() <= 1e-13 * state.alpha()[x]);
    }
}

#[test]
fn sqrt_density_stays_on_the_unit_sphere() {
    // sqrt(f) = sqrt(f0) cos(t/2) + g0/sqrt(f0) sin(t/2) is a great circle.
    let mut r = rng(18);
    for _ in 0..10 {
        let state = random_grid_state(&mut r, 1, 6);
        let space = state.space().clone();
        let a: Vec<f64> = state.f0().iter().map(|f| f.sqrt()).collect();
        let b: Vec<f64> = state.f0().iter().zip(state.g0()).map(|(f, g)| g / f.sqrt()).collect();
        let dot = space.integrate(&a.iter().zip(&b).map(|(x, y)| x * y).collect::<Vec<_>>());
        assert!(dot.abs() <= 1e-12);
        let t = r.random_range(0.0..PI);
        let f = state.density_values(t);
        let (s, c) = (0.5 * t).sin_cos();
        for x in 0..state.len() {
            let root = a[x] * c + b[x] * s;
            assert!((root * root - f[x]).abs() <= 1e-12 * state.alpha()[x]);
        }
    }
}

#[test]
fn simplex_trajectory_stops_at_the_exit_time() {
    let mut r = rng(19);
    for _ in 0..20 {
        let n = r.random_range(1..6);
        let p = random_point(&mut r, n, 0.02);
        let v = random_unit_velocity(&mut r, &p);
        let t_exit = exit_time(&p, &v);
        let inside: Vec<f64> = (0..50).map(|i| (t_exit - 1e-3) * i as f64 / 49.0).collect();
        assert!(simplex_trajectory(&p, &v, &inside).is_ok());
        let err = simplex_trajectory(&p, &v, &[t_exit]).unwrap_err();
        assert!(matches!(err, Error::BoundaryTouch { .. }), "{err:?}");
    }
}

#[test]
fn ellipsoid_tangent_has_unit_length() {
    let mut r = rng(20);
    for _ in 0..100 {
        let n = r.random_range(1..8);
        let p = random_point(&mut r, n, 1e-3);
        let w: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let v = ellipsoid_tangent(&p, &w).unwrap();
        assert!((metric_inner(&p, &v, &v) - 1.0).abs() <= 1e-13);
    }
}

#[test]
fn barycenter_trajectories_are_ellipses_or_lines() {
    let p = SimplexPoint::new(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
    let vertex_taus = [PI / 6.0, 5.0 * PI / 6.0, 3.0 * PI / 2.0];
    for i in 0..24 {
        let tau = i as f64 * PI / 12.0 + 0.05;
        let v = TangentVector::new(ellipse_param_n2(tau).to_vec());
        let t_end = exit_time(&p, &v) - 0.05;
        let times: Vec<f64> = (0..200).map(|k| t_end * k as f64 / 199.0).collect();
        let pts: Vec<[f64; 2]> = simplex_trajectory(&p, &v, &times)
            .unwrap()
            .iter()
            .map(|q| [q.theta()[0], q.theta()[1]])
            .collect();
        let fit = classify_conic(&pts).unwrap();
        assert_eq!(fit.kind, ConicKind::Ellipse, "tau = {tau}");
        assert!(fit.residual <= 1e-8);
    }
    for tau in vertex_taus.iter().chain(&[11.0 * PI / 6.0]) {
        let v = TangentVector::new(ellipse_param_n2(*tau).to_vec());
        let t_end = exit_time(&p, &v) - 0.05;
        let times: Vec<f64> = (0..200).map(|k| t_end * k as f64 / 199.0).collect();
        let pts: Vec<[f64; 2]> = simplex_trajectory(&p, &v, &times)
            .unwrap()
            .iter()
            .map(|q| [q.theta()[0], q.theta()[1]])
            .collect();
        let fit = classify_conic(&pts).unwrap();
        assert_eq!(fit.kind, ConicKind::Line, "tau = {tau}");
        assert!(fit.residual <= 1e-10);
    }
}

#[test]
fn flow_rejects_bad_inputs() {
    let space: Space = DyadicGrid::new(1, 2).unwrap().into();
    let f0 = FiniteDensity::new(space.clone(), vec![1.0; 4]).unwrap();
    let off_center = SignedFunction::new(space.clone(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        normalize_velocity(&f0, &off_center),
        Err(Error::NotCentered { .. })
    ));
    let zero = SignedFunction::new(space.clone(), vec![0.0; 4]).unwrap();
    assert!(matches!(
        normalize_velocity(&f0, &zero),
        Err(Error::DegenerateVelocity { .. })
    ));
    let slow = SignedFunction::new(space, vec![0.5, -0.5, 0.5, -0.5]).unwrap();
    assert!(matches!(
        UnitVelocity::new(&f0, slow),
        Err(Error::NotUnitSpeed { .. })
    ));
    let other: Space = DyadicGrid::new(1, 3).unwrap().into();
    let g = SignedFunction::new(other, vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]).unwrap();
    assert_eq!(normalize_velocity(&f0, &g).unwrap_err(), Error::SpaceMismatch);
}
