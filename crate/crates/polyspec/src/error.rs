//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by polynomial, spectral and dynamical computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands come from different scalar backends or have incompatible shapes.
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    /// An argument violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Division by an exact zero.
    #[error("division by zero")]
    DivisionByZero,
    /// A division that was required to be exact left a nonzero remainder.
    #[error("inexact division: {0}")]
    InexactDivision(String),
    /// A polynomial is not a perfect p-th power.
    #[error("not a {p}-th power: {detail}")]
    NotPthPower { p: usize, detail: String },
    /// Simultaneous root iteration failed to converge.
    #[error("root finding did not converge after {iterations} iterations (worst scaled residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// Periodic points could not be grouped into cycles unambiguously.
    #[error("ambiguous cycle grouping: {0}")]
    AmbiguousCycles(String),
    /// A truncated series lost its leading term.
    #[error("series window exhausted: {0}")]
    WindowExhausted(String),
    /// Two multisets that must be compared have different sizes.
    #[error("cardinality mismatch: {0} vs {1}")]
    CardinalityMismatch(usize, usize),
    /// An iterate would exceed the configured coefficient cap.
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    /// A required radical does not exist in the chosen backend.
    #[error("root unavailable: {0}")]
    RootUnavailable(String),
    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
    /// A mathematical check that must hold did not.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
