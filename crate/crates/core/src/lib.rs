//! Combinatorial MaxCut approximation from parity-signed lazy random walks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: weighted graphs, vertex sets, cut and conductance metrics.
//! - [`walk`]: sampled lazy walks with hop parity, plus the exact DP oracle.
//! - [`spectral`]: matrix-free normalized Laplacian, sweep cuts and a
//!   spectral recursive baseline.
//! - [`threshold`]: threshold classification and the threshold search.
//! - [`local`]: Lovász–Simonovits curves and the cut-or-bound local
//!   partitioner.
//! - [`solver`]: the recursive `simple` and `balance` solvers, the quality
//!   function `H` and the running-time / ratio tradeoff.
//! - [`bench`]: exact and greedy baselines and planted instance generation.

pub mod bench;
pub mod error;
pub mod graph;
pub mod local;
pub mod solver;
pub mod spectral;
pub mod threshold;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{CutMetrics, Partition, Side, Tripartition, VertexSet, WeightedGraph};
