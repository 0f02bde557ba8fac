//! Power control for multiuser CDMA uplinks.
//!
//! Given path gains, signature sequences and fixed linear receivers, this
//! crate builds the interference model, decides whether a set of per-user SIR
//! targets is jointly achievable, and computes the componentwise minimal
//! power allocation when it is. Power limits enter as an intersection of
//! affine halfspaces; when the targets cannot be met under the limits, the
//! balanced answer is the metric projection of the minimal point onto the
//! viable set. A bargaining layer exposes the cooperative-game view whose
//! solution coincides with the minimal allocation.
//!
//! The numeric core is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); the aliases below pin the common `f64`
//! instantiations. File I/O ([`scenario_io`]) is `f64` only.

pub mod bargain;
pub mod error;
pub mod linalg;
pub mod link_model;
pub mod projection;
pub mod region;
pub mod scalar;
pub mod scenario_io;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` instantiations of the core types.
pub type Matrix64 = linalg::Matrix<f64>;
pub type Scenario64 = link_model::Scenario<f64>;
pub type LinkModel64 = link_model::LinkModel<f64>;
pub type PowerVector64 = link_model::PowerVector<f64>;
pub type NonnegMatrix64 = spectral::NonnegMatrix<f64>;
pub type NormalizedSystem64 = region::NormalizedSystem<f64>;
pub type FeasibilityReport64 = region::FeasibilityReport<f64>;
pub type ConstraintSet64 = projection::ConstraintSet<f64>;
pub type Halfspace64 = projection::Halfspace<f64>;
pub type Objective64 = bargain::Objective<f64>;
pub type BargainProblem64 = bargain::BargainProblem<f64>;
