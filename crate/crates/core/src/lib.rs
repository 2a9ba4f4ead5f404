//! Steiner tree heuristics built around star contraction.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: immutable [`Instance`]s, the mutable [`WorkingGraph`] with
//!   contraction/suppression provenance, and solution finalization.
//! - [`stp`]: SteinLib/PACE `.stp` reading and writing, Hanan grids.
//! - [`paths`]: instrumented Dijkstra scans and Voronoi partitions.
//! - [`preprocess`]: 1-safe reductions (cheap rules, SPT, TDT).
//! - [`mst`]: the Voronoi-based terminal MST heuristic and MST+.
//! - [`star`]: best-star search (basic and improved) and the contraction driver.
//! - [`zelikovsky`]: the 3-star heuristic and its two variants.
//! - [`finish`]: the finishers applied after contraction, and the full pipeline.
//! - [`exact`]: Dreyfus–Wagner, used as a ground-truth oracle.
//! - [`experiment`]: checkpointed measurement runs and quartile aggregation.

pub mod dsu;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod finish;
pub mod graph;
pub mod mst;
pub mod paths;
pub mod preprocess;
pub mod random;
pub mod star;
pub mod stp;
pub mod zelikovsky;

pub use error::{Error, Result};
pub use graph::{EdgeId, Instance, SolutionTree, VertexId, WorkingGraph};
pub use star::{Ratio, Star, StarMode};

/// Accumulated search effort. Only star searches report into it; the
/// finishers and the preprocessing are not counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WorkCounter {
    /// Vertices settled by Dijkstra scans.
    pub visited: u64,
    /// Per-vertex best-star evaluations.
    pub ratios: u64,
}
