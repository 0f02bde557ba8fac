//! Physical-layer model: interference coefficients and per-user SIR.
//!
//! A scenario describes `K` synchronous CDMA uplink users with processing
//! gain `N`, path gains `G_ij` from user `j` to user `i`'s base station,
//! signature sequences `s_i` and fixed linear receivers `c_i`. The channel
//! and receiver effects collapse into the coefficients
//! `A_ij = G_ij (c_i's_j)^2` and `C_ii = (c_i'c_i)^2`, which is all the
//! downstream solvers ever look at.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::projection::ConstraintSet;
use crate::scalar::Scalar;

/// Nonnegative finite transmit power vector (linear scale, watts).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector<T>(Vec<T>);

impl<T: Scalar> PowerVector<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::Validation {
                    field: format!("p[{i}]"),
                    reason: "power must be finite and nonnegative".into(),
                });
            }
        }
        Ok(Self(p))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![T::zero(); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn total(&self) -> T {
        self.0.iter().copied().sum()
    }
}

impl<T> std::ops::Deref for PowerVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// How the interference coefficients are specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec<T> {
    /// Raw physical description: gains, signatures and receivers.
    Physical {
        /// K x K path gains, `gains[i][j]` from user j to user i's base station.
        gains: Matrix<T>,
        /// K signature sequences, each of length N.
        signatures: Vec<Vec<T>>,
        /// K receiver vectors, each of length N.
        receivers: Vec<Vec<T>>,
    },
    /// Coefficients given directly, for inputs that specify `A` and `C` as data.
    Derived { a: Matrix<T>, cdiag: Vec<T> },
}

/// A full problem instance prior to any derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub model: ModelSpec<T>,
    /// Noise variance, watts.
    pub sigma2: T,
    /// Per-user SIR targets, strictly positive.
    pub gamma: Vec<T>,
    /// Optional viable power set.
    pub constraints: Option<ConstraintSet<T>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn user_count(&self) -> usize {
        self.gamma.len()
    }

    /// Checks every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let k = self.gamma.len();
        if k == 0 {
            return Err(Error::Validation {
                field: "gamma".into(),
                reason: "at least one user required".into(),
            });
        }
        if !self.sigma2.is_finite() || self.sigma2 <= T::zero() {
            return Err(Error::Validation {
                field: "sigma2".into(),
                reason: "must be finite and positive".into(),
            });
        }
        for (i, &g) in self.gamma.iter().enumerate() {
            if !g.is_finite() || g <= T::zero() {
                return Err(Error::Validation {
                    field: format!("gamma[{i}]"),
                    reason: "must be positive".into(),
                });
            }
        }
        match &self.model {
            ModelSpec::Physical {
                gains,
                signatures,
                receivers,
            } => {
                if gains.nrows() != k || gains.ncols() != k {
                    return Err(Error::Validation {
                        field: "gains".into(),
                        reason: format!("must be {k}x{k}"),
                    });
                }
                for (i, &g) in gains.iter().enumerate() {
                    if !g.is_finite() || g < T::zero() {
                        return Err(Error::Validation {
                            field: format!("gains[{}][{}]", i / k, i % k),
                            reason: "must be finite and nonnegative".into(),
                        });
                    }
                }
                for i in 0..k {
                    if gains[(i, i)] <= T::zero() {
                        return Err(Error::Validation {
                            field: format!("gains[{i}][{i}]"),
                            reason: "own-cell gain must be positive".into(),
                        });
                    }
                }
                if signatures.len() != k || receivers.len() != k {
                    return Err(Error::Validation {
                        field: "signatures".into(),
                        reason: format!("need {k} signature and receiver vectors"),
                    });
                }
                let n = signatures[0].len();
                if n == 0 {
                    return Err(Error::Validation {
                        field: "signatures".into(),
                        reason: "processing gain must be at least 1".into(),
                    });
                }
                for (name, vecs) in [("signatures", signatures), ("receivers", receivers)] {
                    for (i, v) in vecs.iter().enumerate() {
                        if v.len() != n {
                            return Err(Error::Validation {
                                field: format!("{name}[{i}]"),
                                reason: format!("expected length {n}"),
                            });
                        }
                        if v.iter().any(|x| !x.is_finite()) {
                            return Err(Error::Validation {
                                field: format!("{name}[{i}]"),
                                reason: "entries must be finite".into(),
                            });
                        }
                    }
                }
            }
            ModelSpec::Derived { a, cdiag } => {
                if a.nrows() != k || a.ncols() != k {
                    return Err(Error::Validation {
                        field: "a".into(),
                        reason: format!("must be {k}x{k}"),
                    });
                }
                if a.iter().any(|x| !x.is_finite() || *x < T::zero()) {
                    return Err(Error::Validation {
                        field: "a".into(),
                        reason: "entries must be finite and nonnegative".into(),
                    });
                }
                if cdiag.len() != k {
                    return Err(Error::Validation {
                        field: "cdiag".into(),
                        reason: format!("expected length {k}"),
                    });
                }
                if cdiag.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
                    return Err(Error::Validation {
                        field: "cdiag".into(),
                        reason: "entries must be finite and positive".into(),
                    });
                }
            }
        }
        if let Some(cs) = &self.constraints {
            cs.validate(k)?;
        }
        Ok(())
    }
}

/// Channel and receiver effects folded into one coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel<T> {
    /// K x K, `A_ij = G_ij (c_i's_j)^2`.
    pub a: Matrix<T>,
    /// Diagonal `C_ii = (c_i'c_i)^2`.
    pub cdiag: Vec<T>,
}

impl<T: Scalar> LinkModel<T> {
    /// Direct construction from already-derived coefficients.
    pub fn new(a: Matrix<T>, cdiag: Vec<T>) -> Result<Self> {
        if !a.is_square() || a.nrows() != cdiag.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: cdiag.len(),
            });
        }
        for i in 0..a.nrows() {
            if a[(i, i)] <= T::zero() {
                return Err(Error::DegenerateUser(i));
            }
        }
        if a.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::InvalidScenario("A must be nonnegative and finite".into()));
        }
        if cdiag.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
            return Err(Error::InvalidScenario("Cdiag must be positive and finite".into()));
        }
        Ok(Self { a, cdiag })
    }

    pub fn user_count(&self) -> usize {
        self.cdiag.len()
    }
}

/// Derives `A` and `Cdiag` from a scenario.
pub fn build_link_model<T: Scalar>(scn: &Scenario<T>) -> Result<LinkModel<T>> {
    scn.validate().map_err(|e| match e {
        Error::Validation { field, reason } => {
            Error::InvalidScenario(format!("{field}: {reason}"))
        }
        other => other,
    })?;
    match &scn.model {
        ModelSpec::Physical {
            gains,
            signatures,
            receivers,
        } => {
            let k = scn.user_count();
            let mut a = Matrix::zeros(k, k);
            let mut cdiag = Vec::with_capacity(k);
            for i in 0..k {
                for j in 0..k {
                    let corr = dot(&receivers[i], &signatures[j]);
                    a[(i, j)] = gains[(i, j)] * corr * corr;
                }
                let cc = dot(&receivers[i], &receivers[i]);
                cdiag.push(cc * cc);
                if a[(i, i)] <= T::zero() {
                    return Err(Error::DegenerateUser(i));
                }
            }
            LinkModel::new(a, cdiag)
        }
        ModelSpec::Derived { a, cdiag } => LinkModel::new(a.clone(), cdiag.clone()),
    }
}

/// Per-user SIR at power vector `p`:
/// `SIR_i(p) = A_ii p_i / (sum_{j!=i} A_ij p_j + C_ii sigma^2)`.
pub fn sir<T: Scalar>(model: &LinkModel<T>, sigma2: T, p: &PowerVector<T>) -> Result<Vec<T>> {
    let k = model.user_count();
    if p.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: p.len(),
        });
    }
    Ok((0..k)
        .map(|i| {
            let interference: T = (0..k)
                .filter(|&j| j != i)
                .map(|j| model.a[(i, j)] * p[j])
                .sum();
            model.a[(i, i)] * p[i] / (interference + model.cdiag[i] * sigma2)
        })
        .collect())
}
