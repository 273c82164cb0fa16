use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SieveError>;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("L_OUT_OF_RANGE: log2 segment size {l} outside [{min}, {max}]")]
    LOutOfRange { l: u32, min: u32, max: u32 },
    #[error("F_ZERO_OR_OVERLAP: {0}")]
    FZeroOrOverlap(String),
    #[error("OVERFLOW: {0}")]
    Overflow(String),
    #[error("INDEX_OUT_OF_RANGE: {0}")]
    IndexOutOfRange(String),
    #[error("NOT_ADMISSIBLE: index {index} is congruent to {residue} mod 15, outside the wheel")]
    NotAdmissible { index: u64, residue: u64 },
    #[error("ALLOC_LIMIT: {0}")]
    AllocLimit(String),
    #[error("LIMIT_TOO_LARGE: sieve limit {0} exceeds 2^32")]
    LimitTooLarge(u64),
    #[error("RANGE_TOO_LARGE: upper bound {0} exceeds 2^40")]
    RangeTooLarge(u64),
    #[error("IO_ERROR: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SieveError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SieveError::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by bad input rather than by the run itself.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            SieveError::LOutOfRange { .. }
                | SieveError::FZeroOrOverlap(_)
                | SieveError::Overflow(_)
                | SieveError::IndexOutOfRange(_)
                | SieveError::NotAdmissible { .. }
                | SieveError::LimitTooLarge(_)
                | SieveError::RangeTooLarge(_)
        )
    }
}
