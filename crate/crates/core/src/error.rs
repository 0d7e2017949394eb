use thiserror::Error;

use crate::graph::NodeTag;

#[derive(Debug, Error)]
pub enum Error {
    #[error("claw centered at {center} with leaves {} {} {}", leaves[0], leaves[1], leaves[2])]
    ClawFound { center: NodeTag, leaves: [NodeTag; 3] },

    #[error("weights too large: n*(w_max+4n) = {product} must stay below 2^62")]
    WeightBound { product: u128 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not liftable: {0}")]
    NotLiftable(String),

    #[error("structure is not basic: {0}")]
    NotBasic(String),

    #[error("certificate failed: {0}")]
    Certificate(String),

    #[error("instance too large for exhaustive search: {nodes} free nodes (limit {limit})")]
    TooLarge { nodes: usize, limit: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}

pub(crate) fn certificate<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Certificate(msg.into()))
}
