//! Independent oracles used by the integration and acceptance suites.
//!
//! Everything here deliberately avoids the library's own solve paths:
//! eigenvalues come from a dense general eigensolver, nearest points from
//! active-set enumeration, fixed points from plain iteration, and optima
//! from grid search.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

use powerplan_core::linalg::Matrix;
use powerplan_core::link_model::PowerVector;
use powerplan_core::projection::ConstraintSet;
use powerplan_core::region::{is_member, NormalizedSystem};

/// Spectral radius via nalgebra's dense complex eigensolver.
pub fn eig_spectral_radius(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

pub fn matrix_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).to_vec()).collect()
}

/// Fixed-point iteration p <- Gamma B p + Gamma tau; converges iff the
/// system is contractive and then to the minimal point.
pub fn fixed_point_oracle(sys: &NormalizedSystem<f64>, iters: usize) -> Vec<f64> {
    let k = sys.user_count();
    let mut p = vec![0.0; k];
    for _ in 0..iters {
        let bp = sys.b.mul_vec(&p).unwrap();
        for i in 0..k {
            p[i] = sys.gamma[i] * (bp[i] + sys.tau[i]);
        }
    }
    p
}

/// Exact nearest point of `cs ∩ {p >= 0}` to `p0` by enumerating active
/// sets of the KKT system. Intended for small dimensions and few
/// halfspaces.
pub fn nearest_point_oracle(p0: &[f64], cs: &ConstraintSet<f64>) -> Vec<f64> {
    let dim = p0.len();
    // rows: a'x <= b for each halfspace, then -x_i <= 0 for the orthant
    let mut rows: Vec<(Vec<f64>, f64)> = cs
        .halfspaces
        .iter()
        .map(|h| (h.normal.clone(), h.offset))
        .collect();
    for i in 0..dim {
        let mut a = vec![0.0; dim];
        a[i] = -1.0;
        rows.push((a, 0.0));
    }
    let m = rows.len();
    let feasible = |x: &[f64]| {
        rows.iter()
            .all(|(a, b)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= b + 1e-9)
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if !feasible(&x) {
            return;
        }
        let d: f64 = x
            .iter()
            .zip(p0)
            .map(|(xi, pi)| (xi - pi) * (xi - pi))
            .sum();
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, x));
        }
    };

    consider(p0.to_vec());
    for mask in 1u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if active.len() > dim {
            continue;
        }
        let s = active.len();
        // x = p0 - A_S' lambda with A_S x = b_S  =>  (A_S A_S') lambda = A_S p0 - b_S
        let gram = DMatrix::from_fn(s, s, |r, c| {
            rows[active[r]]
                .0
                .iter()
                .zip(&rows[active[c]].0)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        });
        let rhs = nalgebra::DVector::from_fn(s, |r, _| {
            rows[active[r]]
                .0
                .iter()
                .zip(p0)
                .map(|(a, p)| a * p)
                .sum::<f64>()
                - rows[active[r]].1
        });
        let Some(lambda) = gram.lu().solve(&rhs) else {
            continue;
        };
        // KKT: multipliers of inequality constraints must be nonnegative
        if lambda.iter().any(|&l| l < -1e-9) {
            continue;
        }
        let mut x = p0.to_vec();
        for (idx, &row_idx) in active.iter().enumerate() {
            for d in 0..dim {
                x[d] -= lambda[idx] * rows[row_idx].0[d];
            }
        }
        consider(x);
    }
    best.expect("constraint set contains the origin").1
}

/// Grid search maximizer of the Nash product over the box subject to SIR
/// membership, for K = 2.
pub fn nash_grid_oracle(
    sys: &NormalizedSystem<f64>,
    pmax: &[f64],
    u0: &[f64],
    step: f64,
) -> Option<(Vec<f64>, f64)> {
    assert_eq!(sys.user_count(), 2);
    let n1 = (pmax[0] / step).floor() as usize;
    let n2 = (pmax[1] / step).floor() as usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for i in 0..=n1 {
        let p1 = i as f64 * step;
        for j in 0..=n2 {
            let p2 = j as f64 * step;
            // inline membership: [I - Gamma B] p >= Gamma tau
            let lhs1 = p1 - sys.gamma[0] * sys.b[(0, 1)] * p2;
            let lhs2 = p2 - sys.gamma[1] * sys.b[(1, 0)] * p1;
            if lhs1 < sys.gamma[0] * sys.tau[0] - 1e-9 || lhs2 < sys.gamma[1] * sys.tau[1] - 1e-9 {
                continue;
            }
            let product = (pmax[0].exp() - p1.exp() - u0[0]) * (pmax[1].exp() - p2.exp() - u0[1]);
            if best.as_ref().map_or(true, |(_, bp)| product > *bp) {
                best = Some((vec![p1, p2], product));
            }
        }
    }
    best
}

/// Bisection on the feasibility boundary of scaled targets: finds the scale
/// `s*` where `rho(diag(s gamma) B)` crosses one.
pub fn boundary_scale_oracle(sys: &NormalizedSystem<f64>, mut lo: f64, mut hi: f64) -> f64 {
    let rho_at = |s: f64| {
        let gamma: Vec<f64> = sys.gamma.iter().map(|g| g * s).collect();
        let scaled = NormalizedSystem::new(sys.b.clone(), sys.tau.clone(), gamma).unwrap();
        powerplan_core::spectral::spectral_radius(&scaled.gated_matrix(), 1e-12, 100_000).unwrap()
    };
    assert!(rho_at(lo) < 1.0 && rho_at(hi) > 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if rho_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random members of the power region: the minimal point plus nonnegative
/// perturbations, re-verified by membership, with pure upscaling as a
/// fallback that is always a member.
pub fn sample_member(
    sys: &NormalizedSystem<f64>,
    pi: &[f64],
    rng: &mut impl Rng,
) -> PowerVector<f64> {
    for _ in 0..32 {
        let candidate: Vec<f64> = pi
            .iter()
            .map(|&v| v + rng.gen::<f64>() * 0.5 * (v + 0.1))
            .collect();
        let candidate = PowerVector::new(candidate).unwrap();
        if is_member(sys, &candidate, 1e-9).unwrap() {
            return candidate;
        }
    }
    let scale = 1.0 + rng.gen::<f64>();
    PowerVector::new(pi.iter().map(|&v| v * scale).collect()).unwrap()
}

/// Random contractive-or-not nonnegative matrix rows, rescaled so the
/// spectral radius hits `target` (uses the eigensolver oracle for the
/// rescale, not the library).
pub fn random_scaled_matrix(n: usize, target: f64, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let rho = eig_spectral_radius(&rows);
        if rho > 1e-9 {
            return rows
                .into_iter()
                .map(|r| r.into_iter().map(|v| v * target / rho).collect())
                .collect();
        }
    }
}
