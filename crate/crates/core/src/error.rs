use thiserror::Error;

/// Errors raised while validating link parameters or evaluating formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("n_r must be even and at least 2 for full-duplex relaying, got {0}")]
    OddRelayAntennas(usize),

    #[error("cannot combine an all-zero channel vector")]
    ZeroVector,

    #[error("scheme mismatch: expected {expected}, found {found}")]
    SchemeMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
