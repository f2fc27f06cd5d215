//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },
    #[error("size cap exceeded for {what}: {got} > {limit}")]
    Cap { what: &'static str, limit: usize, got: usize },
    #[error("codeword pair ({0}, {1}) does not have full cover")]
    NotFullCover(usize, usize),
    #[error("C_min is zero: the Gram matrix does not have full cover")]
    ZeroCover,
    #[error("degenerate channel: projected weight vector vanishes")]
    DegenerateChannel,
    #[error("incompatible codebook: {0}")]
    Incompatible(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid { name, reason: reason.into() }
}
