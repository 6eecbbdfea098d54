#![allow(dead_code)]

use fisher_geodesics::{metric_inner, SimplexPoint, TangentVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Barycentric coordinates with every entry at least `floor`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> SimplexPoint {
    let raw: Vec<f64> = (0..=n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let spare = 1.0 - floor * (n + 1) as f64;
    let theta: Vec<f64> = raw[..n].iter().map(|x| floor + spare * x / total).collect();
    SimplexPoint::new(theta).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> TangentVector {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().any(|x| x.abs() > 1e-3) {
            return TangentVector::new(v);
        }
    }
}

pub fn random_unit_velocity(rng: &mut ChaCha8Rng, p: &SimplexPoint) -> TangentVector {
    let w = random_direction(rng, p.dim());
    let norm = metric_inner(p, &w, &w).sqrt();
    w.scaled(norm.recip())
}

/// Exit time of the closed-form geodesic from the open simplex: the first zero
/// of `alpha_k cos^2(t/2 - beta_k)` over all `n + 1` coordinates.
pub fn exit_time(p: &SimplexPoint, v: &TangentVector) -> f64 {
    p.barycentric()
        .iter()
        .zip(v.full())
        .map(|(t, z)| std::f64::consts::PI + 2.0 * (z / t).atan())
        .fold(f64::INFINITY, f64::min)
}
