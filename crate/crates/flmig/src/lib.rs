//! Community detection by modularity maximization.
//!
//! The centerpiece is the fast-local-move iterated greedy engine
//! ([`engine::run_flmig`]): destruction and stochastic reconstruction
//! iterations around a queue-driven local move, with refinement that keeps
//! every community internally connected and a simulated-annealing acceptance
//! rule. Louvain, Louvain-prune, and label propagation ship as baselines,
//! together with modularity/NMI metrics, planted-partition benchmark
//! generation, LFR file loading, and a seeded multi-run experiment harness.

pub mod baselines;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lfr;
pub mod partition;
pub mod quality;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{condense, connected_components, parse_edge_list, write_edge_list, Graph, NodeId, NodeLabelMap, ParseOptions};
pub use partition::{read_membership, write_membership, CommunityId, NeighborCommunityScan, Partition};
pub use quality::{modularity, modularity_gain, modularity_reference, nmi, LabeledPartition, Resolution};
