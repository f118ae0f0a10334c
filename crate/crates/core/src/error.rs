use thiserror::Error;

/// Failures surfaced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method did not reach the requested accuracy.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The evaluation budget ran out before the tolerance was met.
    #[error("evaluation budget exceeded after {evaluations} evaluations (error estimate {abs_error:e}, value {value:e})")]
    BudgetExceeded {
        evaluations: usize,
        value: f64,
        abs_error: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    /// Short name of the error class, as printed by the command line tool.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Convergence(_) => "ConvergenceError",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
