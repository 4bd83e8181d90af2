//! Permutation synchronization: recover absolute permutations at the nodes of a
//! graph from corrupted relative permutations on its edges.
//!
//! The crate provides the iteratively reweighted graph-connection-Laplacian
//! solver (`irgcl`), the usual baselines, synthetic corruption models, a small
//! text file format for problems and solutions, and checks of the method's
//! exactness and message-passing properties.

pub mod analysis;
pub mod bench;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod measurement;
pub mod models;
pub mod perm;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{AffinityMatrix, EdgeValues, Topology, WeightedGraph};
pub use measurement::{block_inner, build_gcw, squared_gcw_ratio, BlockMeasurement, GcwOperator};
pub use models::{ModelConfig, ProblemInstance};
pub use perm::{correlation_affinity, project_to_permutation, Permutation, SquareBlock};
pub use solvers::{Algorithm, Schedule, SolverReport};
