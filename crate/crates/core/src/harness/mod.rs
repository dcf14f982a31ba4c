//! Experiment harness: TOML configs, seeded experiments, verification
//! suites, dataset export and the command line.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod experiments;
pub mod verify;
