//! The power region: normalized system, membership, feasibility and the
//! componentwise minimal allocation.
//!
//! With `b_ij = A_ij / A_ii` (zero diagonal) and `tau_i = C_ii sigma^2 / A_ii`,
//! a positive power vector meets all SIR targets iff
//!
//!   [I - diag(gamma) B] p >= diag(gamma) tau   (componentwise).
//!
//! The region is nonempty exactly when `rho(diag(gamma) B) < 1`, and then the
//! equality system has a unique positive solution `pi(gamma)` dominated by
//! every other member.

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, Matrix};
use crate::link_model::{LinkModel, PowerVector};
use crate::scalar::Scalar;
use crate::spectral::{spectral_radius, NonnegMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Default absolute slack (watts) for membership tests.
pub const DEFAULT_SLACK_TOL: f64 = 1e-9;

/// The algebraic core every solver consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSystem<T> {
    /// Normalized interference matrix, zero diagonal.
    pub b: Matrix<T>,
    /// Normalized noise floor, strictly positive.
    pub tau: Vec<T>,
    /// SIR targets, strictly positive.
    pub gamma: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    /// Spectral radius within the tolerance band around one; treated as
    /// infeasible by callers.
    Boundary,
}

impl std::fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeasibilityStatus::Feasible => write!(f, "feasible"),
            FeasibilityStatus::Infeasible => write!(f, "infeasible"),
            FeasibilityStatus::Boundary => write!(f, "boundary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport<T> {
    pub status: FeasibilityStatus,
    /// Estimated `rho(diag(gamma) B)`.
    pub rho: T,
    /// The minimal allocation `pi(gamma)`, present iff feasible.
    pub min_point: Option<PowerVector<T>>,
}

/// Outcome of solving `[I - A] x = c` for nonnegative `A`, `c`.
#[derive(Debug, Clone, PartialEq)]
pub enum NonnegSolve<T> {
    /// `rho(A) < 1`: the unique solution, nonnegative (positive when `c > 0`).
    Solved { rho: T, x: Vec<T> },
    /// `rho(A) >= 1`: no contraction, the system has no positive solution pair.
    NoContraction { rho: T },
}

impl<T: Scalar> NormalizedSystem<T> {
    pub fn new(b: Matrix<T>, tau: Vec<T>, gamma: Vec<T>) -> Result<Self> {
        let k = tau.len();
        if !b.is_square() || b.nrows() != k || gamma.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: b.nrows(),
            });
        }
        if b.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::InvalidScenario("B must be nonnegative and finite".into()));
        }
        for i in 0..k {
            if b[(i, i)] != T::zero() {
                return Err(Error::InvalidScenario(format!("B must have zero diagonal (row {i})")));
            }
        }
        if tau.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
            return Err(Error::InvalidScenario("tau must be positive and finite".into()));
        }
        if gamma.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
            return Err(Error::InvalidScenario("gamma must be positive and finite".into()));
        }
        Ok(Self { b, tau, gamma })
    }

    pub fn user_count(&self) -> usize {
        self.tau.len()
    }

    /// `diag(gamma) B`, the matrix whose radius gates feasibility.
    pub fn gated_matrix(&self) -> NonnegMatrix<T> {
        let k = self.user_count();
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.gamma[i] * self.b[(i, j)];
            }
        }
        NonnegMatrix::new(m).expect("gamma B is nonnegative by construction")
    }

    /// Per-user SIR expressed through the normalized system:
    /// `SIR_i(p) = p_i / ((Bp)_i + tau_i)`.
    pub fn achieved_sir(&self, p: &[T]) -> Result<Vec<T>> {
        let bp = self.b.mul_vec(p)?;
        Ok(p.iter()
            .zip(bp.iter().zip(&self.tau))
            .map(|(&pi, (&bpi, &ti))| pi / (bpi + ti))
            .collect())
    }
}

/// Normalizes a link model into `(B, tau)` against targets `gamma`.
pub fn normalize<T: Scalar>(
    model: &LinkModel<T>,
    sigma2: T,
    gamma: &[T],
) -> Result<NormalizedSystem<T>> {
    let k = model.user_count();
    if gamma.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: gamma.len(),
        });
    }
    if !sigma2.is_finite() || sigma2 <= T::zero() {
        return Err(Error::InvalidScenario("sigma2 must be positive".into()));
    }
    let mut b = Matrix::zeros(k, k);
    let mut tau = Vec::with_capacity(k);
    for i in 0..k {
        let aii = model.a[(i, i)];
        for j in 0..k {
            if j != i {
                b[(i, j)] = model.a[(i, j)] / aii;
            }
        }
        tau.push(model.cdiag[i] * sigma2 / aii);
    }
    NormalizedSystem::new(b, tau, gamma.to_vec())
}

/// Membership test of `p` in the power region, with absolute slack.
pub fn is_member<T: Scalar>(
    sys: &NormalizedSystem<T>,
    p: &PowerVector<T>,
    slack_tol: T,
) -> Result<bool> {
    let k = sys.user_count();
    if p.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: p.len(),
        });
    }
    let bp = sys.b.mul_vec(p)?;
    Ok((0..k).all(|i| p[i] - sys.gamma[i] * bp[i] >= sys.gamma[i] * sys.tau[i] - slack_tol))
}

/// Solves `[I - A] x = c` for nonnegative `A` and `c >= 0`, gated by the
/// contraction test rather than by inspecting the solve.
pub fn solve_nonneg_system<T: Scalar>(a: &NonnegMatrix<T>, c: &[T]) -> Result<NonnegSolve<T>> {
    solve_nonneg_system_with(a, c, T::from_f64_lossy(DEFAULT_TOL), DEFAULT_MAX_ITER)
}

/// [`solve_nonneg_system`] with explicit spectral tolerance and iteration cap.
pub fn solve_nonneg_system_with<T: Scalar>(
    a: &NonnegMatrix<T>,
    c: &[T],
    tol: T,
    max_iter: usize,
) -> Result<NonnegSolve<T>> {
    let n = a.dim();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    if c.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err(Error::InvalidScenario("right-hand side must be nonnegative".into()));
    }
    let rho = spectral_radius(a, tol, max_iter)?;
    if rho >= T::one() - tol {
        return Ok(NonnegSolve::NoContraction { rho });
    }
    let mut system = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            system[(i, j)] = system[(i, j)] - a.inner()[(i, j)];
        }
    }
    let x = system.lu_solve(c)?;
    Ok(NonnegSolve::Solved { rho, x })
}

/// Feasibility decision plus the minimal point `pi(gamma)` when it exists.
pub fn min_power_point<T: Scalar>(sys: &NormalizedSystem<T>) -> Result<FeasibilityReport<T>> {
    min_power_point_with(sys, T::from_f64_lossy(DEFAULT_TOL), DEFAULT_MAX_ITER)
}

/// [`min_power_point`] with explicit spectral tolerance and iteration cap.
pub fn min_power_point_with<T: Scalar>(
    sys: &NormalizedSystem<T>,
    tol: T,
    max_iter: usize,
) -> Result<FeasibilityReport<T>> {
    let gated = sys.gated_matrix();
    let rho = spectral_radius(&gated, tol, max_iter)?;
    let status = if rho < T::one() - tol {
        FeasibilityStatus::Feasible
    } else if rho > T::one() + tol {
        FeasibilityStatus::Infeasible
    } else {
        FeasibilityStatus::Boundary
    };
    if status != FeasibilityStatus::Feasible {
        return Ok(FeasibilityReport {
            status,
            rho,
            min_point: None,
        });
    }
    let rhs: Vec<T> = sys
        .gamma
        .iter()
        .zip(&sys.tau)
        .map(|(&g, &t)| g * t)
        .collect();
    let x = match solve_nonneg_system_with(&gated, &rhs, tol, max_iter)? {
        NonnegSolve::Solved { x, .. } => x,
        NonnegSolve::NoContraction { .. } => return Err(Error::SingularSystem),
    };
    // residual check against the normalized right-hand side
    let gbx = gated.inner().mul_vec(&x)?;
    let residual: Vec<T> = (0..x.len()).map(|i| x[i] - gbx[i] - rhs[i]).collect();
    let bound = T::from_f64_lossy(1e-9) * norm_inf(&rhs);
    if norm_inf(&residual) > bound.max(T::from_f64_lossy(1e-300)) {
        return Err(Error::SingularSystem);
    }
    Ok(FeasibilityReport {
        status,
        rho,
        min_point: Some(PowerVector::new(x.iter().map(|v| v.max(T::zero())).collect())?),
    })
}

/// Membership of the convex and componentwise geometric-mean combinations of
/// two members. Both flags must come back true; a false is a solver bug.
pub fn check_convexity_sample<T: Scalar>(
    sys: &NormalizedSystem<T>,
    p1: &PowerVector<T>,
    p2: &PowerVector<T>,
    alpha: T,
    slack_tol: T,
) -> Result<(bool, bool)> {
    if !is_member(sys, p1, slack_tol)? {
        return Err(Error::NotMember(1));
    }
    if !is_member(sys, p2, slack_tol)? {
        return Err(Error::NotMember(2));
    }
    let one = T::one();
    let convex: Vec<T> = p1
        .iter()
        .zip(p2.iter())
        .map(|(&a, &b)| alpha * a + (one - alpha) * b)
        .collect();
    let geo: Vec<T> = p1
        .iter()
        .zip(p2.iter())
        .map(|(&a, &b)| a.powf(alpha) * b.powf(one - alpha))
        .collect();
    Ok((
        is_member(sys, &PowerVector::new(convex)?, slack_tol)?,
        is_member(sys, &PowerVector::new(geo)?, slack_tol)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_model::LinkModel;
    use approx::assert_relative_eq;

    fn worked_system() -> NormalizedSystem<f64> {
        NormalizedSystem::new(
            Matrix::from_rows(vec![vec![0.0, 0.2], vec![0.3, 0.0]]).unwrap(),
            vec![0.1, 0.1],
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn normalize_identity_model() {
        let m = LinkModel::new(Matrix::identity(2), vec![1.0, 1.0]).unwrap();
        let sys = normalize(&m, 0.1, &[1.0, 1.0]).unwrap();
        assert_eq!(sys.b, Matrix::zeros(2, 2));
        assert_eq!(sys.tau, vec![0.1, 0.1]);
    }

    #[test]
    fn normalize_worked_model() {
        let m = LinkModel::new(
            Matrix::from_rows(vec![vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap(),
            vec![1.0, 1.0],
        )
        .unwrap();
        let sys = normalize(&m, 0.1, &[1.0, 1.0]).unwrap();
        assert_eq!(sys, worked_system());
    }

    #[test]
    fn normalize_with_scaling() {
        let m = LinkModel::new(
            Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
            vec![4.0, 4.0],
        )
        .unwrap();
        let sys = normalize(&m, 0.5, &[1.0, 1.0]).unwrap();
        assert_eq!(sys.b, Matrix::from_rows(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap());
        assert_eq!(sys.tau, vec![1.0, 1.0]);
    }

    #[test]
    fn membership_boundary_and_violation() {
        let sys = NormalizedSystem::new(Matrix::zeros(2, 2), vec![0.1, 0.1], vec![1.0, 1.0]).unwrap();
        assert!(is_member(&sys, &PowerVector::new(vec![0.1, 0.1]).unwrap(), 1e-9).unwrap());
        assert!(!is_member(&sys, &PowerVector::new(vec![0.05, 0.2]).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn membership_of_fixed_point() {
        let sys = worked_system();
        let p = PowerVector::new(vec![12.0 / 94.0, 13.0 / 94.0]).unwrap();
        assert!(is_member(&sys, &p, 1e-12).unwrap());
    }

    #[test]
    fn min_point_diagonal_case() {
        let sys = NormalizedSystem::new(Matrix::zeros(2, 2), vec![0.1, 0.1], vec![2.0, 2.0]).unwrap();
        let rep = min_power_point(&sys).unwrap();
        assert_eq!(rep.status, FeasibilityStatus::Feasible);
        let p = rep.min_point.unwrap();
        assert_relative_eq!(p[0], 0.2, max_relative = 1e-14);
        assert_relative_eq!(p[1], 0.2, max_relative = 1e-14);
    }

    #[test]
    fn min_point_worked_example() {
        let rep = min_power_point(&worked_system()).unwrap();
        assert_eq!(rep.status, FeasibilityStatus::Feasible);
        assert_relative_eq!(rep.rho, 0.06_f64.sqrt(), epsilon = 1e-9);
        let p = rep.min_point.unwrap();
        assert_relative_eq!(p[0], 12.0 / 94.0, epsilon = 1e-14);
        assert_relative_eq!(p[1], 13.0 / 94.0, epsilon = 1e-14);
    }

    #[test]
    fn boundary_system_rejected() {
        let sys = NormalizedSystem::new(
            Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            vec![0.1, 0.1],
            vec![1.0, 1.0],
        )
        .unwrap();
        let rep = min_power_point(&sys).unwrap();
        assert_ne!(rep.status, FeasibilityStatus::Feasible);
        assert!(rep.min_point.is_none());
    }

    #[test]
    fn solve_identity() {
        let a = NonnegMatrix::from_rows(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        match solve_nonneg_system(&a, &[1.0, 2.0]).unwrap() {
            NonnegSolve::Solved { x, .. } => assert_eq!(x, vec![1.0, 2.0]),
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn solve_worked() {
        let a = NonnegMatrix::from_rows(vec![vec![0.0, 0.2], vec![0.3, 0.0]]).unwrap();
        match solve_nonneg_system(&a, &[0.1, 0.1]).unwrap() {
            NonnegSolve::Solved { x, .. } => {
                assert_relative_eq!(x[0], 12.0 / 94.0, epsilon = 1e-14);
                assert_relative_eq!(x[1], 13.0 / 94.0, epsilon = 1e-14);
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn solve_no_contraction() {
        let a = NonnegMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            solve_nonneg_system(&a, &[1.0, 1.0]).unwrap(),
            NonnegSolve::NoContraction { .. }
        ));
    }

    #[test]
    fn sir_tight_at_min_point() {
        let sys = worked_system();
        let rep = min_power_point(&sys).unwrap();
        let p = rep.min_point.unwrap();
        let s = sys.achieved_sir(&p).unwrap();
        for (si, gi) in s.iter().zip(&sys.gamma) {
            assert_relative_eq!(si, gi, max_relative = 1e-12);
        }
    }

    #[test]
    fn convexity_sample_endpoints() {
        let sys = worked_system();
        let rep = min_power_point(&sys).unwrap();
        let p = rep.min_point.unwrap();
        let q = PowerVector::new(p.iter().map(|v| v + 0.05).collect()).unwrap();
        assert_eq!(
            check_convexity_sample(&sys, &p, &p, 0.3, 1e-9).unwrap(),
            (true, true)
        );
        assert_eq!(
            check_convexity_sample(&sys, &p, &q, 0.0, 1e-9).unwrap(),
            (true, true)
        );
    }

    #[test]
    fn convexity_sample_rejects_non_member() {
        let sys = worked_system();
        let p = PowerVector::new(vec![0.0, 0.0]).unwrap();
        let q = PowerVector::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            check_convexity_sample(&sys, &p, &q, 0.5, 1e-9),
            Err(Error::NotMember(1))
        ));
    }

    #[test]
    fn monotone_targets_raise_min_point() {
        let sys = worked_system();
        let p0 = min_power_point(&sys).unwrap().min_point.unwrap();
        let harder = NormalizedSystem::new(sys.b.clone(), sys.tau.clone(), vec![1.5, 1.0]).unwrap();
        let p1 = min_power_point(&harder).unwrap().min_point.unwrap();
        for i in 0..2 {
            assert!(p1[i] >= p0[i] - 1e-12);
        }
    }
}
