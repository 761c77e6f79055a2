//! Lazy random walks on sequences of graphs.
//!
//! A schedule `G_1, G_2, …` on a fixed vertex set induces lazy transition
//! matrices `P^{(t)}`; the walk takes `X_t ~ P^{(t)}(X_{t-1}, ·)`. The crate
//! provides the graph and chain primitives, schedules, exact propagation and
//! Monte Carlo engines, the extremal constructions, and bounds on commute
//! times of static graphs.

pub mod catalog;
pub mod chain;
pub mod commute;
pub mod conductance;
pub mod constructions;
pub mod decay;
pub mod error;
pub mod generate;
pub mod graph;
pub mod report;
pub mod scalar;
pub mod schedule;
pub mod spectral;
pub mod walk;

pub use chain::{DenseMatrix, LazyChainStep, LikelihoodState, StationaryDistribution};
pub use error::{Error, Result};
pub use generate::{generate, Family};
pub use graph::{StaticGraph, VertexSet};
pub use report::{BoundReport, Provenance, Tally, Tolerances};
pub use scalar::Scalar;
pub use schedule::GraphSchedule;

pub use num_rational::BigRational;

/// Floating-point lazy chain step.
pub type LazyChain = LazyChainStep<f64>;
/// Exact rational lazy chain step.
pub type ExactLazyChain = LazyChainStep<BigRational>;
pub type Distribution = StationaryDistribution<f64>;
pub type ExactDistribution = StationaryDistribution<BigRational>;
