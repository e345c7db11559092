use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("{what} exceeds cap: {size} > {cap}")]
    CapExceeded { what: String, size: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("games do not share players, trees and payoffs: {0}")]
    SkeletonMismatch(String),

    #[error("missing nature strategy")]
    MissingNature,

    #[error("discovery did not absorb within {0} steps")]
    NotAbsorbed(usize),

    #[error("no rationalizable self-confirming equilibrium found on the absorbing game")]
    NoRsce,

    #[error("invalid profile: {0}")]
    Profile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
