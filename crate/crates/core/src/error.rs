use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument sits on a pole of a gamma factor.
    #[error("pole at {what} = {at}")]
    Pole { what: &'static str, at: f64 },

    /// Argument outside the domain where the formula is valid.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input (shape, non-finite value, zero coordinate, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An integration or sampling routine gave up before reaching tolerance.
    /// Carries the best estimate so callers can still report it.
    #[error("{what} did not converge: estimate {estimate:e} with error bound {err_bound:e}")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        err_bound: f64,
    },

    #[error("no admissible exponent tuple: {0}")]
    InfeasibleCertificate(String),

    #[error("moment of order {p} does not exist for a {q}-stable law (requires p < q when q < 2)")]
    MomentNonexistent { p: f64, q: f64 },

    #[error("no transform evaluator for {0}")]
    NoEvaluator(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the caller's arguments rather than the
    /// numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }
}
