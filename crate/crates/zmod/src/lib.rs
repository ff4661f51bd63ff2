//! Community detection toolkit built around two quality functions: the
//! classic modularity `Q` and its Z-score variant `Z` (Z-modularity).
//!
//! The crate provides:
//!
//! - [`graph`]: immutable simple undirected graphs, vertex partitions, and
//!   the plain-text edge-list / partition file formats;
//! - [`quality`]: exact and incremental evaluation of `Q` and `Z` with
//!   O(deg v) move deltas, the machinery behind the optimizer;
//! - [`anneal`]: simulated-annealing maximization of either objective with
//!   individual vertex moves plus collective merge/split moves;
//! - [`generate`]: benchmark families (ring of cliques, paired cliques,
//!   planted partitions, Hanoi graphs) bundled with reference divisions;
//! - [`analytic`]: closed-form values for clique rings and the regression
//!   tables, used as independent oracles against the direct evaluators;
//! - [`nmi`]: normalized mutual information between partitions.

pub mod analytic;
pub mod anneal;
pub mod generate;
pub mod graph;
pub mod nmi;
pub mod quality;

pub use anneal::{anneal, AnnealConfig, AnnealResult};
pub use graph::{Graph, GraphError, Partition, PartitionError};
pub use quality::{MoveTarget, Objective, QualityState};
