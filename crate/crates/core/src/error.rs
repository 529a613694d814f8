use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Non-finite numbers, non-rotations, zero axes and similar malformed arguments.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A Bloch vector outside the unit ball or a matrix that is not a density operator.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// Fano data violating the purity constraints.
    #[error("invalid purification: {0}")]
    InvalidPurification(String),
    /// A channel parameter outside its physical range.
    #[error("invalid channel parameter: {0}")]
    InvalidParameter(String),
    /// Kraus operators that do not satisfy the completeness relation.
    #[error("invalid Kraus set: {0}")]
    InvalidKraus(String),
    /// An affine map that sent a state outside the Bloch ball.
    #[error("channel validity: {0}")]
    ChannelValidity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
