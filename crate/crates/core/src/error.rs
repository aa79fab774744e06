use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tabulated potential evaluated outside its grid at r = {r} (grid [{lo}, {hi}])")]
    Extrapolation { r: f64, lo: f64, hi: f64 },

    #[error("divergent integral for component k = {k}: {reason}")]
    Divergent { k: usize, reason: String },

    #[error("no convergence after {iterations} iterations: {reason}")]
    NoConvergence { iterations: usize, reason: String },

    #[error("Gram matrix is not numerically positive definite at pivot {pivot} (pivot {value:e}, condition estimate {condition:e})")]
    NotPositiveDefinite {
        pivot: usize,
        value: f64,
        condition: f64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
