//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad dimensions, invalid parameters, unparseable files.
    #[error("validation: {0}")]
    Validation(String),

    /// A function or derivative evaluation produced a non-finite value.
    #[error("evaluation at {point:?}: {reason}")]
    Evaluation { point: Vec<f64>, reason: String },

    /// The halfspace constraint g(q, u) > 0 failed at a concrete point.
    #[error("halfspace violation at {point:?}: g(q,u) = {value:.6e} <= {limit:.1e}")]
    Halfspace {
        point: Vec<f64>,
        value: f64,
        limit: f64,
    },

    /// An integration ran into the singular boundary of the halfspace.
    #[error("singularity near s = {at}: {reason}")]
    Singular { at: f64, reason: String },

    /// An iterative method exhausted its budget.
    #[error("no convergence after {iterations} iterations (best residual {best:.6e})")]
    NoConvergence { iterations: usize, best: f64 },

    /// States that valid inputs cannot reach.
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
