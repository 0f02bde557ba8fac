//! Spectral radius of nonnegative matrices.
//!
//! The contraction test `rho(diag(gamma) B) < 1` is the feasibility gate for
//! the whole solver. The estimate comes from power iteration on a diagonally
//! shifted copy of the matrix, with Collatz-Wielandt bounds as a two-sided
//! stopping certificate: for a positive iterate `x`,
//!
//!   min_i (Mx)_i / x_i  <=  rho(M)  <=  max_i (Mx)_i / x_i.
//!
//! Shifting by `s I` moves the Perron root to `rho + s` exactly, so the shift
//! is subtracted back out at the end. A shift proportional to the matrix
//! scale keeps the iteration convergent for reducible and periodic matrices,
//! where the unshifted subdominant eigenvalue can tie the Perron root in
//! modulus.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Default two-sided tolerance for the radius estimate.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Validated nonnegative square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix<T>(Matrix<T>);

impl<T: Scalar> NonnegMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::InvalidScenario(
                "matrix entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &Matrix<T> {
        &self.0
    }
}

/// Outcome of the contraction test.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<T> {
    pub contractive: bool,
    /// Estimated spectral radius.
    pub rho: T,
    /// `1 - rho`; negative when not contractive.
    pub margin: T,
}

/// Estimates `rho(M)` to within `tol * max(1, rho(M))`.
pub fn spectral_radius<T: Scalar>(m: &NonnegMatrix<T>, tol: T, max_iter: usize) -> Result<T> {
    if tol <= T::zero() || max_iter == 0 {
        return Err(Error::InvalidScenario(
            "spectral radius needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(T::zero());
    }
    let mat = m.inner();
    let scale = (0..n)
        .map(|i| mat.row(i).iter().copied().sum::<T>())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return Ok(T::zero());
    }
    // Shift keeps the iteration strictly positive and separates the Perron
    // root from subdominant eigenvalues of equal modulus.
    let shift = tol / T::from_f64_lossy(10.0) + T::from_f64_lossy(0.1) * scale;
    let mut x = vec![T::one(); n];
    for _ in 0..max_iter {
        let mut y = mat.mul_vec(&x)?;
        for i in 0..n {
            y[i] = y[i] + shift * x[i];
        }
        let ratios: Vec<T> = (0..n).map(|i| y[i] / x[i]).collect();
        let lower = ratios.iter().copied().fold(T::infinity(), T::min);
        let upper = ratios.iter().copied().fold(T::zero(), T::max);
        if upper - lower <= tol {
            // midpoint of the certified bracket, shift removed
            let est = (lower + upper) / T::from_f64_lossy(2.0) - shift;
            return Ok(est.max(T::zero()));
        }
        // renormalize to the largest component
        let norm = y.iter().copied().fold(T::zero(), T::max);
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::SingularSystem);
        }
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(Error::NoConvergence(max_iter))
}

/// Contraction test `rho(M) < 1 - tol`, with the estimate and margin attached.
pub fn is_contractive<T: Scalar>(m: &NonnegMatrix<T>, tol: T) -> Result<ContractionReport<T>> {
    let rho = spectral_radius(m, tol, DEFAULT_MAX_ITER)?;
    Ok(ContractionReport {
        contractive: rho < T::one() - tol,
        rho,
        margin: T::one() - rho,
    })
}
