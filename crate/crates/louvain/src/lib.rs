//! Shared-memory parallel Louvain community detection.
//!
//! An optimized implementation of the Louvain method (Blondel et al.,
//! 2008) for undirected weighted graphs in CSR form: asynchronous
//! parallel local moving with vertex pruning, threshold scaling across
//! passes, an aggregation-tolerance early stop, and an allocation-free
//! aggregation phase built on parallel prefix sums, preallocated CSR
//! buffers, and collision-free per-thread hashtables. Single-threaded
//! runs are bit-for-bit deterministic; a brute-force oracle module backs
//! the test suite.
//!
//! ```
//! use louvain::{louvain, LouvainParams};
//!
//! let graph = louvain::synthetic::barbell(); // two triangles, one bridge
//! let result = louvain(&graph, &LouvainParams::default())?;
//! assert_eq!(result.membership.as_slice(), &[0, 0, 0, 1, 1, 1]);
//! assert!((result.modularity.unwrap() - 5.0 / 14.0).abs() < 1e-12);
//! # Ok::<(), louvain::LouvainError>(())
//! ```
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`detect_karate`** — load a Matrix Market file and detect communities
//! - **`metrics_tour`** — modularity both ways, community weights, O(1) move gains
//! - **`aggregate_supergraph`** — collapse a partition into its super-vertex graph
//! - **`exhaustive_check`** — compare against brute-force optimal partitions
//! - **`parallel_scaling`** — thread sweep with per-phase time splits
//! - **`tune_parameters`** — effect of each optimization knob
//!
//! ```bash
//! cargo run --example detect_karate
//! cargo run --release --example parallel_scaling
//! ```
//!
//! The `louvain` binary wraps the same pipeline behind `run`, `bench` and
//! `scale` subcommands; see the repository README for the file formats.

pub mod algo;
pub mod cli;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod synthetic;

pub use algo::{
    aggregate, best_community, exclusive_scan, local_move, lookup_dendrogram, louvain, renumber,
    scan_communities, LouvainError, LouvainParams, LouvainResult, PhaseTimings, PruneFlags,
    ScanAccumulator,
};
pub use graph::{build_csr, load_edge_list, load_matrix_market, CsrGraph, EdgeList, GraphError};
pub use metrics::{
    community_weights, count_communities, delta_modularity, modularity, modularity_edge_form,
    move_gain, CommunityWeights, Membership, MetricsError,
};
