//! The viable power set and metric projection onto it.
//!
//! `P_max` is a finite intersection of affine halfspaces `{p : a'p <= beta}`
//! with the nonnegative orthant. When the SIR region is nonempty but does not
//! intersect `P_max`, the balanced answer is the Euclidean projection of the
//! minimal point onto `P_max`, computed by Dykstra's cyclic scheme. Plain
//! alternating projection only reaches *some* point of the intersection;
//! the per-set correction vectors are what make the limit the nearest point.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::link_model::PowerVector;
use crate::region::{is_member, min_power_point, FeasibilityStatus, NormalizedSystem};
use crate::scalar::Scalar;

/// Default stopping tolerance on correction increments.
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;
/// Default cycle cap for Dykstra's scheme.
pub const DEFAULT_MAX_CYCLES: usize = 100_000;

/// Affine halfspace `{p : a'p <= beta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Result<Self> {
        if normal.iter().all(|&v| v == T::zero()) {
            return Err(Error::InvalidScenario("halfspace normal must be nonzero".into()));
        }
        if normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidScenario("halfspace must be finite".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn contains(&self, p: &[T], tol: T) -> bool {
        dot(&self.normal, p) <= self.offset + tol
    }
}

/// Finite halfspace description of `P_max`, with implicit `p >= 0`.
///
/// Validation enforces nonnegative normals and nonnegative offsets: the set
/// then contains the origin and is closed under simultaneous power decrease.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintSet<T> {
    pub halfspaces: Vec<Halfspace<T>>,
}

impl<T: Scalar> ConstraintSet<T> {
    pub fn new(halfspaces: Vec<Halfspace<T>>) -> Self {
        Self { halfspaces }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        for (idx, h) in self.halfspaces.iter().enumerate() {
            if h.normal.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: h.normal.len(),
                });
            }
            if h.normal.iter().any(|&v| v < T::zero() || !v.is_finite()) {
                return Err(Error::Validation {
                    field: format!("halfspaces[{idx}].normal"),
                    reason: "must be componentwise nonnegative (downward closed set)".into(),
                });
            }
            if h.normal.iter().all(|&v| v == T::zero()) {
                return Err(Error::Validation {
                    field: format!("halfspaces[{idx}].normal"),
                    reason: "must be nonzero".into(),
                });
            }
            if !(h.offset.is_finite() && h.offset >= T::zero()) {
                return Err(Error::Validation {
                    field: format!("halfspaces[{idx}].offset"),
                    reason: "must be finite and nonnegative (origin must be viable)".into(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &[T], tol: T) -> bool {
        p.iter().all(|&v| v >= -tol) && self.halfspaces.iter().all(|h| h.contains(p, tol))
    }

    /// Intersection of two constraint sets.
    pub fn intersect(mut self, other: ConstraintSet<T>) -> Self {
        self.halfspaces.extend(other.halfspaces);
        self
    }

    /// Per-user caps implied by the unit-normal halfspaces, if every user has
    /// one. Used where an objective needs an explicit box.
    pub fn box_caps(&self, k: usize) -> Option<Vec<T>> {
        let mut caps = vec![T::infinity(); k];
        for h in &self.halfspaces {
            let nonzero: Vec<usize> = h
                .normal
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != T::zero())
                .map(|(i, _)| i)
                .collect();
            if let [i] = nonzero[..] {
                caps[i] = caps[i].min(h.offset / h.normal[i]);
            }
        }
        if caps.iter().all(|c| c.is_finite()) {
            Some(caps)
        } else {
            None
        }
    }
}

/// Individual caps `p_i <= pmax_i` as K unit-normal halfspaces.
pub fn box_constraints<T: Scalar>(pmax: &[T]) -> Result<ConstraintSet<T>> {
    let k = pmax.len();
    let mut hs = Vec::with_capacity(k);
    for (i, &cap) in pmax.iter().enumerate() {
        if !cap.is_finite() || cap <= T::zero() {
            return Err(Error::InvalidBound(i));
        }
        let mut normal = vec![T::zero(); k];
        normal[i] = T::one();
        hs.push(Halfspace::new(normal, cap)?);
    }
    Ok(ConstraintSet::new(hs))
}

/// Total budget `sum_i p_i <= pmax_total` as a single halfspace.
pub fn total_budget<T: Scalar>(pmax_total: T, k: usize) -> Result<ConstraintSet<T>> {
    if !pmax_total.is_finite() || pmax_total <= T::zero() {
        return Err(Error::InvalidBound(0));
    }
    Ok(ConstraintSet::new(vec![Halfspace::new(
        vec![T::one(); k],
        pmax_total,
    )?]))
}

/// Closed-form projection onto one halfspace:
/// `p - (a'p - beta)^+ a / (a'a)`.
pub fn project_halfspace<T: Scalar>(p: &[T], h: &Halfspace<T>) -> Result<Vec<T>> {
    if p.len() != h.normal.len() {
        return Err(Error::DimensionMismatch {
            expected: h.normal.len(),
            got: p.len(),
        });
    }
    let violation = (dot(&h.normal, p) - h.offset).max(T::zero());
    if violation == T::zero() {
        return Ok(p.to_vec());
    }
    let scale = violation / dot(&h.normal, &h.normal);
    Ok(p.iter()
        .zip(&h.normal)
        .map(|(&pi, &ai)| pi - scale * ai)
        .collect())
}

fn project_orthant<T: Scalar>(p: &[T]) -> Vec<T> {
    p.iter().map(|&v| v.max(T::zero())).collect()
}

/// Nearest point of `cs ∩ {p >= 0}` to `p0`, by Dykstra's cyclic scheme.
pub fn project_onto<T: Scalar>(
    p0: &[T],
    cs: &ConstraintSet<T>,
    tol: T,
    max_cycles: usize,
) -> Result<PowerVector<T>> {
    if p0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidScenario("projection input must be finite".into()));
    }
    cs.validate(p0.len())?;
    let n_sets = cs.halfspaces.len() + 1; // orthant participates as one set
    let dim = p0.len();
    let mut x = p0.to_vec();
    let mut corrections = vec![vec![T::zero(); dim]; n_sets];
    let blowup = T::from_f64_lossy(1e6) * (T::one() + norm2(p0));
    for _cycle in 0..max_cycles {
        let mut max_increment = T::zero();
        for s in 0..n_sets {
            let y: Vec<T> = x
                .iter()
                .zip(&corrections[s])
                .map(|(&xi, &ei)| xi + ei)
                .collect();
            let projected = if s == 0 {
                project_orthant(&y)
            } else {
                project_halfspace(&y, &cs.halfspaces[s - 1])?
            };
            let new_correction: Vec<T> = y
                .iter()
                .zip(&projected)
                .map(|(&yi, &pi)| yi - pi)
                .collect();
            let increment: T = new_correction
                .iter()
                .zip(&corrections[s])
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                .sqrt();
            max_increment = max_increment.max(increment);
            if !increment.is_finite() || norm2(&new_correction) > blowup {
                return Err(Error::NoConvergence(_cycle));
            }
            corrections[s] = new_correction;
            x = projected;
        }
        if max_increment <= tol {
            // final sweep leaves x in the orthant after the last halfspace;
            // clip tiny negatives introduced by the halfspace step
            return PowerVector::new(project_orthant(&x));
        }
    }
    Err(Error::NoConvergence(max_cycles))
}

/// Balanced answer for an infeasible constrained instance, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedSolution<T> {
    /// `Proj(pi(gamma) | P_max)`.
    pub power: PowerVector<T>,
    /// The unconstrained minimal point that was projected.
    pub min_point: PowerVector<T>,
    /// Achieved SIR per user at the balanced point.
    pub sir: Vec<T>,
    /// `SIR_i / gamma_i` per user; below one means the target is missed.
    pub shortfall: Vec<T>,
}

/// Projects the minimal point onto the viable set when the two do not meet.
pub fn balance_infeasible<T: Scalar>(
    sys: &NormalizedSystem<T>,
    cs: &ConstraintSet<T>,
    tol: T,
    max_cycles: usize,
) -> Result<BalancedSolution<T>> {
    let report = min_power_point(sys)?;
    if report.status != FeasibilityStatus::Feasible {
        return Err(Error::RegionEmpty);
    }
    let pi = report.min_point.expect("feasible report carries the minimal point");
    let slack = T::from_f64_lossy(crate::region::DEFAULT_SLACK_TOL);
    if cs.contains(&pi, slack) && is_member(sys, &pi, slack)? {
        return Err(Error::AlreadyFeasible);
    }
    let power = project_onto(&pi, cs, tol, max_cycles)?;
    let sir = sys.achieved_sir(&power)?;
    let shortfall = sir.iter().zip(&sys.gamma).map(|(&s, &g)| s / g).collect();
    Ok(BalancedSolution {
        power,
        min_point: pi,
        sir,
        shortfall,
    })
}
