use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// The stacked residue system has no solution at the given points.
    #[error("inconsistent residue system (relative residual {residual:.3e} > {tolerance:.1e})")]
    Inconsistent { residual: f64, tolerance: f64 },

    #[error("psi_{index} vanishes identically; the solution set is positive-dimensional")]
    IdenticallyZeroPsi { index: usize },

    #[error("{failed} of {total} homotopy paths failed to converge")]
    PathFailure { failed: usize, total: usize },

    #[error("numerical ambiguity: {0}")]
    NumericalAmbiguity(String),

    #[error("verification failure: {0}")]
    VerificationFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
