//! Virtual CDN placement and migration: an exact integer-programming style
//! solver (OPAC) and a Gomory-Hu tree heuristic (HPAC), with the cost
//! metrics and experiment harness used to compare them across network
//! scales.

pub mod cli;
pub mod flow;
pub mod ghtree;
pub mod hpac;
pub mod metrics;
pub mod model;
pub mod opac;
pub mod rat;
pub mod solution;

pub use model::{NodeId, Scenario, VcdnId};
pub use rat::Rat;
pub use solution::PlacementSolution;
