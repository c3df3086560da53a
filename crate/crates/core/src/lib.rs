//! Decides whether the lumpable stochastic matrices supported on a digraph
//! form an exponential family, with checkable certificates.
//!
//! The layered [`criteria::decide`] tries cheap combinatorial rules first and
//! falls back to the exact dimensional criterion in [`dimension`]. Numerical
//! witnesses live in [`witness`]; [`census`] enumerates small state spaces.

pub mod census;
pub mod criteria;
pub mod digraph;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod lumping;
pub mod spectral;
pub mod witness;

pub use criteria::{decide, Certificate, DecideConfig, Decision, Rule, Verdict};
pub use digraph::{Digraph, Edge};
pub use dimension::DimensionReport;
pub use error::{Error, Result};
pub use exec::Execution;
pub use lumping::LumpingMap;
pub use spectral::{EdgeFunction, StochasticMatrix};
