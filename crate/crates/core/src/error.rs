use thiserror::Error;

/// Errors produced by model construction, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// User `i` has zero effective own-link coefficient, its SIR is identically zero.
    #[error("degenerate user {0}: G_ii (c_i's_i)^2 = 0")]
    DegenerateUser(usize),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Spectral iteration failed to close the Collatz-Wielandt bracket.
    #[error("spectral radius estimate did not converge within {0} iterations")]
    NoConvergence(usize),

    /// Linear solve broke down although the contraction test passed.
    #[error("linear system numerically singular")]
    SingularSystem,

    #[error("point {0} is not a member of the power region")]
    NotMember(usize),

    #[error("power bound {0} must be positive")]
    InvalidBound(usize),

    #[error("component {0} exceeds its power cap")]
    OutOfBox(usize),

    /// The SIR region itself is empty; there is no minimal point to work with.
    #[error("power region is empty (spectral radius at or above one)")]
    RegionEmpty,

    /// Projection was requested but the minimal point already satisfies the constraints.
    #[error("minimal power point already satisfies the power constraints")]
    AlreadyFeasible,

    /// SIR region is nonempty but does not intersect the viable power set.
    #[error("no feasible power allocation under the given power constraints")]
    Infeasible,

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error in field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
