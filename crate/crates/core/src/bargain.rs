//! Game-theoretic layer: monotone objectives, utilities and the Nash
//! bargaining solution.
//!
//! Each user's utility is `f_i(p) = e^{pmax_i} - e^{p_i}`, the gain from not
//! having to transmit at full power, with disagreement point
//! `u0 = -e^{pmax}`. Since every componentwise monotone objective attains its
//! minimum over the region at the minimal point `pi(gamma)`, the bargaining
//! solution needs no numerical maximizer: it *is* `pi(gamma)` whenever the
//! constrained region is nonempty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::link_model::PowerVector;
use crate::region::{is_member, min_power_point, FeasibilityStatus, NormalizedSystem};
use crate::scalar::Scalar;

/// Power caps above this would overflow `e^{pmax}`; powers here are abstract
/// linear units, not dBm.
pub const MAX_CAP: f64 = 50.0;

/// Componentwise monotone objectives over power vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective<T> {
    /// `(sum p_i^q)^(1/q)`, `q >= 1`.
    Lq { q: T },
    /// Total power, the `q = 1` special case.
    Sum,
    /// `-prod_i (e^{pmax_i} - e^{p_i})`, defined on the box `0 <= p <= pmax`.
    NashGame { pmax: Vec<T> },
}

impl<T: Scalar> Objective<T> {
    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            Objective::Lq { q } => {
                if !(q.is_finite() && *q >= T::one()) {
                    return Err(Error::Validation {
                        field: "objective.q".into(),
                        reason: "must be >= 1".into(),
                    });
                }
            }
            Objective::Sum => {}
            Objective::NashGame { pmax } => validate_caps(pmax, k)?,
        }
        Ok(())
    }
}

fn validate_caps<T: Scalar>(pmax: &[T], k: usize) -> Result<()> {
    if pmax.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: pmax.len(),
        });
    }
    let cap_limit = T::from_f64_lossy(MAX_CAP);
    for (i, &c) in pmax.iter().enumerate() {
        if !c.is_finite() || c <= T::zero() || c > cap_limit {
            return Err(Error::InvalidBound(i));
        }
    }
    Ok(())
}

pub fn evaluate_objective<T: Scalar>(obj: &Objective<T>, p: &PowerVector<T>) -> Result<T> {
    obj.validate(p.len())?;
    match obj {
        Objective::Sum => Ok(p.total()),
        Objective::Lq { q } => {
            let s: T = p.iter().map(|&v| v.powf(*q)).sum();
            Ok(s.powf(T::one() / *q))
        }
        Objective::NashGame { pmax } => {
            let f = utility(p, pmax)?;
            let prod = f.iter().fold(T::one(), |acc, &v| acc * v);
            Ok(-prod)
        }
    }
}

/// Per-user utility `f_i(p) = e^{pmax_i} - e^{p_i}` on the box.
pub fn utility<T: Scalar>(p: &PowerVector<T>, pmax: &[T]) -> Result<Vec<T>> {
    validate_caps(pmax, p.len())?;
    for (i, (&pi, &cap)) in p.iter().zip(pmax).enumerate() {
        if pi > cap {
            return Err(Error::OutOfBox(i));
        }
    }
    Ok(p.iter()
        .zip(pmax)
        .map(|(&pi, &cap)| cap.exp() - pi.exp())
        .collect())
}

/// Nash product `prod_{j : u_j != u0_j} (f_j(p) - u0_j)`.
///
/// With `u0 = -e^{pmax}` every factor is strictly positive (`f >= 0 > u0`),
/// so no coordinate is ever skipped.
pub fn nash_product<T: Scalar>(p: &PowerVector<T>, pmax: &[T], u0: &[T]) -> Result<T> {
    if u0.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: u0.len(),
        });
    }
    let f = utility(p, pmax)?;
    Ok(f.iter()
        .zip(u0)
        .filter(|(&fi, &ui)| fi != ui)
        .map(|(&fi, &ui)| fi - ui)
        .fold(T::one(), |acc, v| acc * v))
}

/// A bargaining instance over the constrained power region.
#[derive(Debug, Clone, PartialEq)]
pub struct BargainProblem<T> {
    pub sys: NormalizedSystem<T>,
    pub pmax: Vec<T>,
    /// Disagreement utilities, `-e^{pmax}` componentwise.
    pub u0: Vec<T>,
}

impl<T: Scalar> BargainProblem<T> {
    pub fn new(sys: NormalizedSystem<T>, pmax: Vec<T>) -> Result<Self> {
        validate_caps(&pmax, sys.user_count())?;
        let u0 = pmax.iter().map(|&c| -c.exp()).collect();
        Ok(Self { sys, pmax, u0 })
    }
}

/// Supporting evidence attached to the bargaining solution.
#[derive(Debug, Clone, PartialEq)]
pub struct NbsCertificate<T> {
    /// Nash product at the solution.
    pub nash_product: T,
    /// Number of sampled feasible alternatives compared against.
    pub samples_checked: usize,
    /// How many of them the solution strictly dominated in Nash product.
    pub samples_dominated: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbsSolution<T> {
    pub power: PowerVector<T>,
    pub certificate: NbsCertificate<T>,
}

/// Solves the bargaining problem.
///
/// The constrained region is nonempty iff `pi(gamma)` fits under the caps
/// (it is dominated by every member), and then `pi(gamma)` maximizes the
/// Nash product. The sampled comparisons in the certificate are a
/// deterministic sanity check, not part of the computation.
pub fn nbs_solve<T: Scalar>(prob: &BargainProblem<T>) -> Result<NbsSolution<T>> {
    let report = min_power_point(&prob.sys)?;
    if report.status != FeasibilityStatus::Feasible {
        return Err(Error::RegionEmpty);
    }
    let pi = report.min_point.expect("feasible report carries the minimal point");
    let slack = T::from_f64_lossy(crate::region::DEFAULT_SLACK_TOL);
    if pi.iter().zip(&prob.pmax).any(|(&p, &cap)| p > cap + slack) {
        return Err(Error::Infeasible);
    }
    let product = nash_product(&pi, &prob.pmax, &prob.u0)?;

    // deterministic sampled cross-check of optimality
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e42_5321);
    let k = pi.len();
    let mut checked = 0usize;
    let mut dominated = 0usize;
    let mut attempts = 0usize;
    while checked < 64 && attempts < 4096 {
        attempts += 1;
        let candidate: Vec<T> = (0..k)
            .map(|i| {
                let headroom = (prob.pmax[i] - pi[i]).max(T::zero());
                pi[i] + headroom * T::from_f64_lossy(rng.gen::<f64>())
            })
            .collect();
        let candidate = PowerVector::new(candidate)?;
        if !is_member(&prob.sys, &candidate, slack)? {
            continue;
        }
        checked += 1;
        let diff: T = candidate
            .iter()
            .zip(pi.iter())
            .map(|(&a, &b)| (a - b).abs())
            .sum();
        if diff == T::zero() || nash_product(&candidate, &prob.pmax, &prob.u0)? <= product {
            dominated += 1;
        }
    }
    Ok(NbsSolution {
        power: pi,
        certificate: NbsCertificate {
            nash_product: product,
            samples_checked: checked,
            samples_dominated: dominated,
        },
    })
}
