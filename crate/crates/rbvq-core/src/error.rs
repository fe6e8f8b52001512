//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error("empty point set")]
    EmptyPoints,
    #[error("non-finite value in point {index}")]
    NonFinite { index: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
