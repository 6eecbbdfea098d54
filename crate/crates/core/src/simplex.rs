//! Fisher information geometry of the open probability simplex.
//!
//! A point is stored by its `n` free coordinates `theta_1..theta_n`; the last
//! barycentric coordinate `theta_{n+1} = 1 - sum theta_i` is derived. Tangent
//! vectors likewise store `n` components and derive `v_{n+1} = -sum v_i`.
//!
//! The metric is `J(theta) = (1/theta_{n+1}) 11^T + diag(1/theta_i)`, whose
//! quadratic form is `sum_{k=1}^{n+1} v_k^2 / theta_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with a barycentric coordinate below this are rejected.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Christoffel symbols are materialized densely up to this dimension.
pub const DENSE_CHRISTOFFEL_MAX: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    theta: Vec<f64>,
    last: f64,
}

impl SimplexPoint {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidPoint {
                reason: "need at least one free coordinate".into(),
            });
        }
        if let Some((i, t)) = theta
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t >= BOUNDARY_TOL))
        {
            return Err(Error::InvalidPoint {
                reason: format!("theta_{} = {t} is not in the open simplex", i + 1),
            });
        }
        let last = 1.0 - theta.iter().sum::<f64>();
        if last < BOUNDARY_TOL {
            return Err(Error::InvalidPoint {
                reason: format!("theta_{} = {last} is not in the open simplex", theta.len() + 1),
            });
        }
        Ok(Self { theta, last })
    }

    /// From all `n + 1` barycentric coordinates; they must sum to one.
    pub fn from_barycentric(full: &[f64]) -> Result<Self> {
        if full.len() < 2 {
            return Err(Error::InvalidPoint {
                reason: "need at least two barycentric coordinates".into(),
            });
        }
        let total: f64 = full.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPoint {
                reason: format!("barycentric coordinates sum to {total}"),
            });
        }
        Self::new(full[..full.len() - 1].to_vec())
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_last(&self) -> f64 {
        self.last
    }

    /// Barycentric coordinate `k` in `0..=n`.
    pub fn coordinate(&self, k: usize) -> f64 {
        if k < self.theta.len() {
            self.theta[k]
        } else {
            self.last
        }
    }

    pub fn barycentric(&self) -> Vec<f64> {
        let mut out = self.theta.clone();
        out.push(self.last);
        out
    }

    pub fn min_coordinate(&self) -> f64 {
        self.theta.iter().copied().fold(self.last, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    v: Vec<f64>,
}

impl TangentVector {
    pub fn new(v: Vec<f64>) -> Self {
        Self { v }
    }

    /// From `n + 1` components that must sum to zero.
    pub fn from_barycentric(full: &[f64]) -> Result<Self> {
        let total: f64 = full.iter().sum();
        let scale = full.iter().map(|x| x.abs()).fold(1.0, f64::max);
        if total.abs() > 1e-12 * scale {
            return Err(Error::NotCentered { mean: total });
        }
        Ok(Self::new(full[..full.len().saturating_sub(1)].to_vec()))
    }

    pub fn zero(n: usize) -> Self {
        Self { v: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn v_last(&self) -> f64 {
        -self.v.iter().sum::<f64>()
    }

    pub fn full(&self) -> Vec<f64> {
        let mut out = self.v.clone();
        out.push(self.v_last());
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.v.iter().map(|x| x * factor).collect())
    }
}

/// Dense symmetric `n x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl MetricMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul(&self, other: &MetricMatrix) -> MetricMatrix {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).map(|l| self.get(i, l) * other.get(l, j)).sum()
        })
    }

    pub fn quad_form(&self, u: &[f64], w: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| u[i] * (0..self.n).map(|j| self.get(i, j) * w[j]).sum::<f64>())
            .sum()
    }

    /// `max |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `max |a_ij - delta_ij|`.
    pub fn distance_to_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.get(i, j) - target).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &MetricMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dim(p: &SimplexPoint, len: usize) -> Result<()> {
    if p.dim() != len {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: len,
        });
    }
    Ok(())
}

/// `J_ij = delta_ij / theta_i + 1 / theta_{n+1}`.
pub fn fisher_matrix(p: &SimplexPoint) -> MetricMatrix {
    let inv_last = p.theta_last().recip();
    MetricMatrix::from_fn(p.dim(), |i, j| {
        if i == j {
            p.theta[i].recip() + inv_last
        } else {
            inv_last
        }
    })
}

/// Closed-form inverse `g^ij = theta_i (delta_ij - theta_j)`.
pub fn fisher_inverse(p: &SimplexPoint) -> MetricMatrix {
    MetricMatrix::from_fn(p.dim(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        p.theta[i] * (delta - p.theta[j])
    })
}

fn product_excluding(c: &[f64], skip_a: usize, skip_b: usize) -> f64 {
    c.iter()
        .enumerate()
        .filter(|(m, _)| *m != skip_a && *m != skip_b)
        .map(|(_, x)| *x)
        .product()
}

/// Determinant of `11^T + diag(c)`: `prod c_i + sum_i prod_{j != i} c_j`.
pub fn rank_one_diag_det(c: &[f64]) -> f64 {
    let n = c.len();
    // prefix[i] = c_0..c_{i-1}, suffix[i] = c_i..c_{n-1}
    let mut prefix = vec![1.0; n + 1];
    let mut suffix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * c[i];
    }
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * c[i];
    }
    prefix[n] + (0..n).map(|i| prefix[i] * suffix[i + 1]).sum::<f64>()
}

/// Inverse of `11^T + diag(c)` as `K / det`, with
/// `K_ii = prod_{j != i} c_j + sum_{l != i} prod_{m != l, i} c_m` and
/// `K_ij = -prod_{m != i, j} c_m`.
pub fn rank_one_diag_inverse(c: &[f64]) -> MetricMatrix {
    let n = c.len();
    let det = rank_one_diag_det(c);
    MetricMatrix::from_fn(n, |i, j| {
        let k = if i == j {
            product_excluding(c, i, i)
                + (0..n)
                    .filter(|&l| l != i)
                    .map(|l| product_excluding(c, l, i))
                    .sum::<f64>()
        } else {
            -product_excluding(c, i, j)
        };
        k / det
    })
}

/// `<u, w>_J = sum u_i w_i / theta_i + (sum u)(sum w) / theta_{n+1}`, in O(n).
pub fn metric_inner(p: &SimplexPoint, u: &TangentVector, w: &TangentVector) -> f64 {
    debug_assert_eq!(u.dim(), p.dim());
    debug_assert_eq!(w.dim(), p.dim());
    let diag: f64 = p
        .theta
        .iter()
        .zip(u.v.iter().zip(&w.v))
        .map(|(t, (a, b))| a * b / t)
        .sum();
    let su: f64 = u.v.iter().sum();
    let sw: f64 = w.v.iter().sum();
    diag + su * sw / p.theta_last()
}

/// Score `d/dtheta_j log phi(x_l, theta)` of atom `l` (1-based, `1..=n+1`).
pub fn score(atom: usize, p: &SimplexPoint) -> Result<Vec<f64>> {
    let n = p.dim();
    if atom == 0 || atom > n + 1 {
        return Err(Error::InvalidAtom {
            index: atom,
            max: n + 1,
        });
    }
    Ok(if atom == n + 1 {
        vec![-p.theta_last().recip(); n]
    } else {
        let mut s = vec![0.0; n];
        s[atom - 1] = p.theta[atom - 1].recip();
        s
    })
}

/// Covariance of the score, `sum_l theta_l s_l s_l^T`.
pub fn score_covariance(p: &SimplexPoint) -> MetricMatrix {
    let n = p.dim();
    let scores: Vec<Vec<f64>> = (1..=n + 1)
        .map(|l| score(l, p).expect("atom index in range"))
        .collect();
    MetricMatrix::from_fn(n, |i, j| {
        scores
            .iter()
            .enumerate()
            .map(|(l, s)| p.coordinate(l) * s[i] * s[j])
            .sum()
    })
}

/// Christoffel symbols of the second kind,
/// `Gamma^k_ij = (theta_k/theta_{n+1} - delta_ij delta_jk / theta_i + delta_ij theta_k/theta_i) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Christoffel {
    /// `data[(k * n + i) * n + j]`.
    Dense { n: usize, data: Vec<f64> },
    ClosedForm { theta: Vec<f64>, last: f64 },
}

fn christoffel_entry(theta: &[f64], last: f64, k: usize, i: usize, j: usize) -> f64 {
    let mut bracket = theta[k] / last;
    if i == j {
        bracket += theta[k] / theta[i];
        if j == k {
            bracket -= theta[i].recip();
        }
    }
    0.5 * bracket
}

impl Christoffel {
    pub fn n(&self) -> usize {
        match self {
            Christoffel::Dense { n, .. } => *n,
            Christoffel::ClosedForm { theta, .. } => theta.len(),
        }
    }

    /// `Gamma^k_ij`, 0-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        match self {
            Christoffel::Dense { n, data } => data[(k * n + i) * n + j],
            Christoffel::ClosedForm { theta, last } => christoffel_entry(theta, *last, k, i, j),
        }
    }

    /// `sum_ij Gamma^k_ij u_i u_j`.
    pub fn contract(&self, k: usize, u: &[f64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.get(k, i, j) * u[i] * u[j];
            }
        }
        acc
    }
}

pub fn christoffel(p: &SimplexPoint) -> Christoffel {
    let n = p.dim();
    if n > DENSE_CHRISTOFFEL_MAX {
        return Christoffel::ClosedForm {
            theta: p.theta.clone(),
            last: p.last,
        };
    }
    let mut data = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                data.push(christoffel_entry(&p.theta, p.last, k, i, j));
            }
        }
    }
    Christoffel::Dense { n, data }
}

/// Velocity-quadratic part of the coupled system for coordinate `k`:
/// `(theta_k/theta_{n+1}) (sum u)^2 - u_k^2/theta_k + theta_k sum u_j^2/theta_j`.
pub(crate) fn coupled_force(theta: &[f64], last: f64, u: &[f64], k: usize) -> f64 {
    let s: f64 = u.iter().sum();
    let energy: f64 = theta.iter().zip(u).map(|(t, x)| x * x / t).sum();
    theta[k] / last * s * s - u[k] * u[k] / theta[k] + theta[k] * energy
}

/// Left-hand side of the coupled geodesic system for each `k`.
pub fn geodesic_residual_coupled(
    p: &SimplexPoint,
    v: &TangentVector,
    a: &[f64],
) -> Result<Vec<f64>> {
    check_dim(p, v.dim())?;
    check_dim(p, a.len())?;
    let s: f64 = v.v.iter().sum();
    let energy: f64 = p.theta.iter().zip(&v.v).map(|(t, x)| x * x / t).sum();
    Ok((0..p.dim())
        .map(|k| {
            let t = p.theta[k];
            2.0 * a[k] + t / p.last * s * s - v.v[k] * v.v[k] / t + t * energy
        })
        .collect())
}

/// `2 theta theta'' + theta^2 - theta'^2`.
pub fn geodesic_residual_decoupled(theta: f64, vel: f64, acc: f64) -> f64 {
    2.0 * theta * acc + theta * theta - vel * vel
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, dt: f64) -> f64 {
    let len = values.len();
    if len < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, y) in values.enumerate() {
        let w = if i == 0 || i == len - 1 { 0.5 } else { 1.0 };
        acc += w * y;
    }
    acc * dt
}

/// Fisher arc length: trapezoid rule on `sqrt(<v, v>_J)` over a uniform time grid.
pub fn fisher_length(samples: &[(SimplexPoint, TangentVector)], dt: f64) -> f64 {
    trapezoid(
        samples
            .iter()
            .map(|(p, v)| metric_inner(p, v, v).max(0.0).sqrt()),
        dt,
    )
}

/// Euclidean arc length of the `(n+1)`-coordinate embedding.
pub fn euclidean_length(samples: &[(SimplexPoint, TangentVector)], dt: f64) -> f64 {
    trapezoid(
        samples
            .iter()
            .map(|(_, v)| v.full().iter().map(|x| x * x).sum::<f64>().sqrt()),
        dt,
    )
}

/// Constant `C` with `l_J <= C l` on `{theta : min_k theta_k >= delta}`.
pub fn compact_set_constant(n: usize, delta: f64) -> f64 {
    delta.recip().sqrt() * ((n + 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn third() -> SimplexPoint {
        SimplexPoint::new(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap()
    }

    fn half() -> SimplexPoint {
        SimplexPoint::new(vec![0.5]).unwrap()
    }

    fn assert_matrix(m: &MetricMatrix, expected: &[&[f64]], tol: f64) {
        for (i, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert_abs_diff_eq!(m.get(i, j), *e, epsilon = tol);
            }
        }
    }

    #[test]
    fn point_validation() {
        assert!(SimplexPoint::new(vec![]).is_err());
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![0.0, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![1e-13, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![f64::NAN]).is_err());
        let p = SimplexPoint::from_barycentric(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p.theta(), &[0.2, 0.3]);
        assert!((p.theta_last() - 0.5).abs() < 1e-16);
        assert!(SimplexPoint::from_barycentric(&[0.2, 0.3, 0.4]).is_err());
    }

    #[test]
    fn tangent_last_component() {
        let v = TangentVector::new(vec![0.25, -1.0]);
        assert_eq!(v.v_last(), 0.75);
        assert_eq!(v.full(), vec![0.25, -1.0, 0.75]);
        assert!(TangentVector::from_barycentric(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn fisher_matrix_examples() {
        assert_matrix(&fisher_matrix(&third()), &[&[6.0, 3.0], &[3.0, 6.0]], 1e-14);
        assert_matrix(&fisher_matrix(&half()), &[&[4.0]], 0.0);
        assert_eq!(fisher_matrix(&third()).asymmetry(), 0.0);
    }

    #[test]
    fn fisher_inverse_examples() {
        let inv = fisher_inverse(&third());
        assert_matrix(&inv, &[&[2.0 / 9.0, -1.0 / 9.0], &[-1.0 / 9.0, 2.0 / 9.0]], 1e-16);
        assert!(fisher_matrix(&third()).mul(&inv).distance_to_identity() < 1e-14);
        assert_matrix(&fisher_inverse(&half()), &[&[0.25]], 0.0);
    }

    #[test]
    fn determinant_lemma_examples() {
        assert_eq!(rank_one_diag_det(&[1.0, 1.0]), 3.0);
        assert_eq!(rank_one_diag_det(&[1.0, 2.0, 3.0]), 17.0);
        assert_eq!(rank_one_diag_det(&[5.0]), 6.0);
    }

    #[test]
    fn inverse_lemma_examples() {
        let inv = rank_one_diag_inverse(&[1.0, 1.0]);
        assert_matrix(&inv, &[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]], 1e-16);
        assert_matrix(&rank_one_diag_inverse(&[5.0]), &[&[1.0 / 6.0]], 1e-17);
        let c = [1.0, 2.0, 3.0];
        let a = MetricMatrix::from_fn(3, |i, j| if i == j { 1.0 + c[i] } else { 1.0 });
        assert!(rank_one_diag_inverse(&c).mul(&a).distance_to_identity() < 1e-15);
    }

    #[test]
    fn metric_inner_examples() {
        let s = 2f64.sqrt() / 6.0;
        let u = TangentVector::new(vec![s, s]);
        assert_abs_diff_eq!(metric_inner(&third(), &u, &u), 1.0, epsilon = 1e-14);
        let zero = TangentVector::zero(2);
        assert_eq!(metric_inner(&third(), &zero, &zero), 0.0);
    }

    #[test]
    fn score_examples() {
        let p = third();
        assert_eq!(score(1, &p).unwrap(), vec![3.0, 0.0]);
        for s in score(3, &p).unwrap() {
            assert_abs_diff_eq!(s, -3.0, epsilon = 1e-15);
        }
        assert!(matches!(score(0, &p), Err(Error::InvalidAtom { .. })));
        assert!(matches!(score(4, &p), Err(Error::InvalidAtom { index: 4, max: 3 })));
        let mean: Vec<f64> = (0..2)
            .map(|j| (1..=3).map(|l| score(l, &p).unwrap()[j] * p.coordinate(l - 1)).sum())
            .collect();
        assert!(mean.iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn score_covariance_examples() {
        assert_matrix(&score_covariance(&third()), &[&[6.0, 3.0], &[3.0, 6.0]], 1e-14);
        assert_matrix(&score_covariance(&half()), &[&[4.0]], 0.0);
    }

    #[test]
    fn christoffel_examples() {
        let g = christoffel(&third());
        assert_abs_diff_eq!(g.get(0, 0, 0), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(0, 0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(0, 1, 1), 1.0, epsilon = 1e-15);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(g.get(k, i, j), g.get(k, j, i));
                }
            }
        }
    }

    #[test]
    fn christoffel_closed_form_above_dense_limit() {
        let n = DENSE_CHRISTOFFEL_MAX + 1;
        let p = SimplexPoint::new(vec![0.5 / n as f64; n]).unwrap();
        let g = christoffel(&p);
        assert!(matches!(g, Christoffel::ClosedForm { .. }));
        assert_eq!(g.get(3, 7, 7), g.get(3, 7, 7));
        assert_eq!(g.get(2, 1, 5), g.get(2, 5, 1));
    }

    #[test]
    fn decoupled_residual_examples() {
        assert_eq!(geodesic_residual_decoupled(1.0, 0.0, -0.5), 0.0);
        assert_eq!(geodesic_residual_decoupled(1.0, 1.0, 0.0), 0.0);
        assert_eq!(geodesic_residual_decoupled(1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn coupled_residual_examples() {
        let p = SimplexPoint::new(vec![0.2, 0.3]).unwrap();
        let r = geodesic_residual_coupled(&p, &TangentVector::zero(2), &[0.0, 0.0]).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        let r = geodesic_residual_coupled(&p, &TangentVector::zero(2), &[0.1, -0.2]).unwrap();
        assert_eq!(r, vec![0.2, -0.4]);
        let r = geodesic_residual_coupled(&p, &TangentVector::new(vec![0.1, 0.05]), &[0.0, 0.0])
            .unwrap();
        assert!(r.iter().all(|x| x.abs() > 1e-3));
        assert!(geodesic_residual_coupled(&p, &TangentVector::zero(3), &[0.0; 2]).is_err());
    }

    #[test]
    fn lengths_of_constant_curve_vanish() {
        let samples = vec![(third(), TangentVector::zero(2)); 10];
        assert_eq!(fisher_length(&samples, 0.1), 0.0);
        assert_eq!(euclidean_length(&samples, 0.1), 0.0);
    }

    #[test]
    fn euclidean_length_of_diagonal_segment() {
        let steps = 101;
        let dt = 0.1 / (steps - 1) as f64;
        let samples: Vec<_> = (0..steps)
            .map(|i| {
                let t = i as f64 * dt;
                (
                    SimplexPoint::new(vec![0.3 + t, 0.3 - t]).unwrap(),
                    TangentVector::new(vec![1.0, -1.0]),
                )
            })
            .collect();
        assert_abs_diff_eq!(euclidean_length(&samples, dt), 0.1 * 2f64.sqrt(), epsilon = 1e-14);
        assert!(euclidean_length(&samples, dt) <= fisher_length(&samples, dt));
    }
}
