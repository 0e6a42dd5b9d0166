//! Experiment runner for the multigrid VQE library: seeded trial batches,
//! summary statistics, CSV output and an invariant-check suite.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;
pub mod stats;
pub mod verify;
