use thiserror::Error;

use crate::offline_table::TableError;

pub type Result<T, E = SvmsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SvmsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row} (scale {scale:e})")]
    SingularSystem { row: usize, pivot: f64, scale: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    Mismatch { expected: usize, got: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Table(#[from] TableError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SvmsError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SvmsError::InvalidArgument(msg.into())
    }

    /// True for errors caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, SvmsError::SingularSystem { .. } | SvmsError::Domain(_))
    }
}
