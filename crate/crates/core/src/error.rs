use thiserror::Error;

/// Errors raised by the ledger library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented invariant (Hermiticity, trace, shape, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The support of the first argument is not contained in the support of
    /// the reference state, so the requested quantity is +infinity.
    #[error("support violation: {0}")]
    SupportViolation(String),

    /// The integrator lost trace or positivity beyond tolerance.
    #[error("step size too large: {0}")]
    StepSize(String),

    /// Model parameters are outside their valid domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

impl Error {
    /// Short machine-readable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Numeric(_) => "numeric",
            Error::SupportViolation(_) => "support_violation",
            Error::StepSize(_) => "step_size",
            Error::Parameter(_) => "parameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
