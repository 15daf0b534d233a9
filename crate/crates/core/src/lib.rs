//! Graph clustering by distance minimization, solved with Boltzmann-machine
//! annealers under parallel tempering.
//!
//! The toolkit covers the full pipeline:
//!
//! - [`graph`] — immutable simple undirected graphs with edge-list / GML ingestion,
//! - [`distance`] — all-pairs Jaccard distance matrices over vertex neighborhoods,
//! - [`quality`] — intra-/inter-cluster density metrics, the quality inequality
//!   `K̄_inter < K < K̄_intra`, and modularity,
//! - [`generators`] — seeded planted-partition and stochastic-block-model benchmarks,
//! - [`anneal`] — a model-agnostic Metropolis engine with replica exchange,
//! - [`qp`] — one-hot encoded quadratic distance minimization,
//! - [`kmedoids`] — K-hot encoded quadratic K-medoids,
//! - [`louvain`] — the greedy modularity-maximization baseline,
//! - [`eval`] — ground-truth matching via maximum Jaccard set similarity.
//!
//! ```
//! use boltzclust::generators::generate_ppm;
//! use boltzclust::qp::qp_solve;
//! use boltzclust::solve::SolveConfig;
//!
//! let (g, truth) = generate_ppm(3, 12, 0.9, 0.1, 7).unwrap();
//! let sol = qp_solve(&g, 3, &SolveConfig::quick(7)).unwrap();
//! assert_eq!(sol.clustering.count(), 3);
//! assert!(sol.report.inequality_lower && sol.report.inequality_upper);
//! assert_eq!(sol.clustering.labels().len(), truth.labels().len());
//! ```

pub mod anneal;
pub mod distance;
pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod kmedoids;
pub mod louvain;
pub mod qp;
pub mod quality;
pub mod solve;

mod rng;

pub use crate::distance::DistanceMatrix;
pub use crate::error::{Error, Result};
pub use crate::graph::Graph;
pub use crate::quality::{Clustering, QualityReport};
