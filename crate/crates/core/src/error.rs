use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("rank cannot be certified at working precision: {0}")]
    RankUncertified(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the given point is not a fixed point of the map")]
    NotAFixedPoint,
    #[error("the jacobian at the fixed point is singular")]
    JacobianSingular,
    #[error("no admissible radius p^-k with k <= {0}")]
    RadiusNotFound(i64),
    #[error("resonance: the degree-{0} invariance equation is singular")]
    ResonanceDetected(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolated(msg.into())
    }

    /// True for the errors that signal a loss of p-adic precision.
    pub fn is_precision_failure(&self) -> bool {
        matches!(self, Error::PrecisionExhausted(_) | Error::RankUncertified(_))
    }
}
