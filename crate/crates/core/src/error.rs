use thiserror::Error;

/// Errors raised by the invariant computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group descriptor: {0}")]
    Descriptor(String),

    #[error("group table is not a group: {0}")]
    NotAGroup(String),

    #[error("group table is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),

    #[error("group order exceeds the configured maximum of {limit}")]
    OrderTooLarge { limit: usize },

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("embedding is not an injective homomorphism: {0}")]
    BadEmbedding(String),

    #[error("invalid representatives: {0}")]
    BadRepresentatives(String),

    #[error("character table: {0}")]
    CharacterTable(String),

    #[error("expected a non-negative integer, got {0}")]
    NonIntegral(String),

    #[error("invalid amalgam: {0}")]
    InvalidAmalgam(String),

    #[error("{0} requires every factor to be finite")]
    SymbolicFactor(&'static str),

    #[error("word belongs to a different amalgam")]
    MixedSpecs,

    #[error("{what} exceeds budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid gauge weights: {0}")]
    InvalidWeights(String),

    #[error("numerical defect: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
