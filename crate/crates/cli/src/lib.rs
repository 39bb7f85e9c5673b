//! Command-line front end for the phase-estimation toolkit: point queries,
//! figure sweeps to CSV, threshold maps, oracle certification and
//! maximum-likelihood demos.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod sweep;

pub use error::CliError;
