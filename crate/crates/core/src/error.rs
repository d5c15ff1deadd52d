//! Error type shared across the library.

use thiserror::Error;

/// Failure modes surfaced by the simulation kernel.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs violate a documented structural precondition: mismatched
    /// dimensions, empty sets, unsupported sizes, inconsistent bookkeeping.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value is outside its mathematical domain (non-positive distance,
    /// subspace dimension larger than the ambient space, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical operation failed: factorization of an indefinite matrix,
    /// an eigenvalue far below zero on a matrix that must be PSD, ...
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
