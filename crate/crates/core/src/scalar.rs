//! Scalar abstraction: the whole solver is generic over the floating type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar the solver operates on (f32 or f64).
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + 'static {
    /// Lossy conversion from f64, used for tolerances and literals.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal not representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
