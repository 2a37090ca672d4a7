//! Error types shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A position outside `[0, n)` was queried or referenced.
    #[error("index {index} out of range for sequence of length {n}")]
    IndexOutOfRange { index: usize, n: usize },

    /// The oracle's optional query budget would be exceeded.
    ///
    /// The offending query is rejected; the budget is never silently
    /// truncated.
    #[error("query budget of {budget} exhausted")]
    BudgetExceeded { budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
