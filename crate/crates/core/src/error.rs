use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// identify the offending input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("non-generic torus weight / indeterminate Euler class: {0}")]
    ZeroWeight(String),

    #[error("Laurent expansion failed: {0}")]
    Expansion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("prefactor parity undefined: {0}")]
    PrefactorParity(String),

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("surface model: {0}")]
    Model(String),

    #[error("limit does not exist: {0}")]
    Limit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
