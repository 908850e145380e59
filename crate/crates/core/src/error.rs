use thiserror::Error;

use crate::bounds::Nat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bound spec: {0}")]
    InvalidSpec(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("search passed the scan bound {bound}")]
    ScanBoundExceeded { bound: usize },

    #[error("invalid pair: {0}")]
    InvalidPair(String),

    /// The rank code of a level-`level` pair does not fit below F(level).
    #[error("code {code} at level {level} is not below F({level}) = {bound}")]
    NotAppropriate { level: usize, code: Nat, bound: Nat },

    #[error("sequence lengths differ: g has {g}, c has {c}")]
    LengthMismatch { g: usize, c: usize },

    #[error("value {value} at position {index} is not below F({index})")]
    OutOfBounds { index: usize, value: Nat },

    #[error("enumeration budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("horizon {horizon} too small: need at least {needed}")]
    HorizonTooSmall { horizon: usize, needed: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
