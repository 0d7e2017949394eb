pub mod clique;
pub mod composition;
pub mod error;
pub mod exact;
pub mod graph;
pub mod lifting;
pub mod matching;
pub mod oracle;
pub mod pipeline;
pub mod stable;

pub use error::{Error, Result};
pub use graph::{NodeTag, Phase, Weight, WeightedGraph};
