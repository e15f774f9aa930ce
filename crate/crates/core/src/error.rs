//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by exact arithmetic and the matrix constructions built on it.
#[derive(Debug, Error)]
pub enum ArithError {
    #[error("prime must be an odd prime, got {0}")]
    NotAnOddPrime(u64),

    #[error("cannot invert: operand has valuation {val} (a unit must have valuation 0)")]
    NonUnit { val: String },

    #[error("cannot divide by a value that is zero or indeterminate at the current precision")]
    DivisionByZeroLike,

    #[error("precision cannot be raised from {have} to {want}")]
    PrecisionInflation { have: i64, want: i64 },

    #[error("precision must be at least 1, got {0}")]
    PrecisionTooSmall(i64),

    #[error("operands live over different primes: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("operands live at different cyclotomic levels: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("cyclotomic level {level} is too large for exact valuation bookkeeping (p = {prime})")]
    LevelTooLarge { prime: u64, level: u32 },

    #[error("level must be at least 1 for this operation")]
    LevelZero,

    #[error("{0}")]
    InvalidInput(String),

    #[error("invariant falsified: {0}")]
    InvariantFalsified(String),

    #[error("matrix is singular at the working precision")]
    SingularMatrix,

    #[error(
        "n = {n} is too small: p^(n-1)(p-1) = {ramification} does not exceed lambda = {lambda}"
    )]
    NTooSmall {
        n: u32,
        ramification: i64,
        lambda: u32,
    },
}

/// Errors raised while reading or validating configuration documents.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("failed to parse JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Arith(#[from] ArithError),

    #[error("{0}")]
    Other(String),
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}
