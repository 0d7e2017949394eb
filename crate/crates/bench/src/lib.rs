//! Fixed instance sets for the pipeline benchmarks.

use mwss_core::oracle::{gen_instance, Model};
use mwss_core::WeightedGraph;

pub const SEEDS: u64 = 3;

pub fn instances(model: Model, n: usize) -> Vec<WeightedGraph> {
    (0..SEEDS).map(|seed| gen_instance(model, n, seed, 100)).collect()
}
