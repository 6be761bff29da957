//! File formats, configuration and subcommands behind the `galerkin-nn`
//! binary.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod report;

pub use commands::{CliError, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, OUTPUT_ENV};
pub use config::{ConfigError, RunConfig};
