use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or parameter lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A query was made outside a tabulated or configured range.
    #[error("range error: {0}")]
    Range(String),
    /// A model, wavelet or field could not be constructed from its inputs.
    #[error("construction error: {0}")]
    Construction(String),
    /// Two objects that must agree in shape (dimension, levels, lengths) do not.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A random descent hit a cube with zero mass.
    #[error("sampling error: {0}")]
    Sampling(String),
    /// No offset schedule could be certified on the requested grid.
    #[error("schedule search failed: {0}")]
    Search(String),
    /// A precondition of an operation is not met.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
