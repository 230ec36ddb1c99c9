use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall in two groups: domain errors (bad input, violated
/// preconditions) and numeric errors (series that fail to converge, root
/// finders that give up). [`Error::is_numeric`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not in Omega: leading coefficient a1 vanishes")]
    NotInOmega,

    #[error("insufficient data: need max_degree >= {required}, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("identity not satisfied: coefficient of z^{degree} is off by {mismatch:e} (tolerance {tolerance:e})")]
    IdentityNotSatisfied {
        degree: usize,
        mismatch: f64,
        tolerance: f64,
    },

    #[error("{what} did not converge after {terms} terms (last term {last_term:e}, partial {partial:e})")]
    NonConvergent {
        what: &'static str,
        terms: usize,
        last_term: f64,
        partial: f64,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("root finder failed: {message}; trace: {trace:?}")]
    Convergence { message: String, trace: Vec<String> },
}

impl Error {
    /// True for failures of numerical procedures, false for bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergent { .. } | Error::Numeric(_) | Error::Convergence { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::Domain(_) => "domain",
            Error::NotInOmega => "not_in_omega",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::IdentityNotSatisfied { .. } => "identity_not_satisfied",
            Error::NonConvergent { .. } => "non_convergent",
            Error::Numeric(_) => "numeric",
            Error::Convergence { .. } => "convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
