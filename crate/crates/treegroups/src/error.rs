//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("depth {depth} outside supported range 1..={max}")]
    DepthRange { depth: usize, max: usize },
    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },
    #[error("{what}: index {index} out of range")]
    IndexRange { what: &'static str, index: usize },
    #[error("{what}: word of length {len} does not fit")]
    WordLength { what: &'static str, len: usize },
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid decomposition: {0}")]
    Decomposition(String),
    #[error("constraint group rejected: {0}")]
    Constraint(String),
    #[error("pattern group is not essential")]
    NotEssential,
    #[error("essentiality undecided within resource caps")]
    EssentialityUndecided,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("empty generating set")]
    EmptyGenerators,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
