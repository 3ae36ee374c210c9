//! The edge list shipped with the crate.
//!
//! 4031 directed `user,friend` rows over a synthetic ego-network graph:
//! mirrored pairs, a few repeated pairs, and one unmirrored row. It is
//! produced by `cargo run -p friendrec-core --example gen_edges`.

use crate::dataset::{load_edges, EdgeRecord};

pub const EDGES_CSV: &str = include_str!("../data/facebook_edges.csv");

/// Row count of [`EDGES_CSV`].
pub const EDGE_ROWS: usize = 4031;

/// Seed used for the committed reference run.
pub const REFERENCE_SEED: u64 = 42;

pub fn edges() -> Vec<EdgeRecord> {
    load_edges(EDGES_CSV.as_bytes()).expect("bundled edge list is valid")
}
