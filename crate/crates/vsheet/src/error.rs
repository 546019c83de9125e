use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong sizes, points outside the domain, bad options.
    #[error("input error: {0}")]
    Input(String),
    /// Singular configuration of the domain functions, e.g. coincident points.
    #[error("domain error: {0}")]
    Domain(String),
    /// The sheet state violates a geometric validity condition.
    #[error("state error: {0}")]
    State(String),
    /// A residual failed a compatibility condition it was required to satisfy.
    #[error("consistency error: {0}")]
    Consistency(String),
    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
