//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by moment computations, bound evaluators, and checks.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input exceeds a configured size cap.
    #[error("size error: {0}")]
    Size(String),

    /// The requested tolerance is below what the configured precision can
    /// certify.
    #[error("precision error: {0}")]
    Precision(String),

    /// An iterative method failed to converge. Carries the last iterate and
    /// the relative residual it reached.
    #[error("numeric error: {context} (last iterate {last_iterate}, residual {residual})")]
    NonConvergence {
        context: String,
        last_iterate: String,
        residual: String,
    },

    /// Arithmetic produced a non-finite value where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
