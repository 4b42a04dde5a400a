//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// The variants are grouped by cause so that callers (notably the command
/// line front end) can map them onto distinct exit statuses: argument
/// problems are [`Error::Domain`] / [`Error::Validation`], everything else is
/// a numerical failure.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain {
        /// Name of the offending function.
        func: &'static str,
        /// Human-readable description of the violated condition.
        detail: String,
    },

    /// A parameter set violates the admissibility rules of the model.
    #[error("invalid parameters: {0}")]
    Validation(String),

    /// An iterative refinement did not reach the requested tolerance.
    #[error("no convergence in {what}: last two values {last:?} after {iterations} refinements")]
    NonConvergence {
        /// What was being refined.
        what: &'static str,
        /// The two most recent iterates (real parts if complex).
        last: (f64, f64),
        /// Number of refinement rounds performed.
        iterations: usize,
    },

    /// The ODE integrator could not proceed.
    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        /// Independent variable of the last accepted step.
        t: f64,
        /// Why the step could not be taken.
        reason: String,
    },

    /// A matrix factorisation met an exactly singular pivot.
    #[error("singular matrix in {0}")]
    Singular(&'static str),

    /// A computation was refused because it would be too ill-conditioned.
    #[error("ill-conditioned computation refused: {0}")]
    Conditioning(String),

    /// A truncated expansion has more mass beyond its cut-off than allowed.
    #[error("truncation error {tail:e} exceeds tolerance {tol:e}; {advice}")]
    Truncation {
        /// Estimated neglected mass.
        tail: f64,
        /// Requested tolerance.
        tol: f64,
        /// Suggested remedy.
        advice: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// `true` for errors caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Validation(_))
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
