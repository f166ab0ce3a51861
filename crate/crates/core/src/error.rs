//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument failed validation before any computation started.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An iterative numerical procedure exhausted its budget. Carries the
    /// partial state accumulated so far.
    #[error("{context}: no convergence after {segments} segments (partial value {partial:e})")]
    NonConvergence {
        context: &'static str,
        partial: f64,
        segments: usize,
    },

    /// An exhaustive enumeration was requested beyond its supported size.
    #[error("{what}: exhaustive enumeration supports n <= {max}, got {got}")]
    CapacityExceeded {
        what: &'static str,
        max: usize,
        got: usize,
    },

    /// Evaluation requested outside the mathematical domain of a kernel.
    #[error("domain error: {0}")]
    Domain(String),

    /// The discretized kernel has an eigenvalue too negative to clip.
    #[error(
        "kernel not positive semidefinite: eigenvalue {min_lambda:e} below -{tol:e} * max|lambda|"
    )]
    NotPositiveSemidefinite { min_lambda: f64, tol: f64 },

    /// Input data degenerate for the requested estimator.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
