//! Command-line front end for the exemplar dynamics simulator: config files,
//! subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{execute, run, Outcome, Subcommand};
pub use config::{parse_config, parse_config_with, ConfigError, RunSpec};
pub use csv::Table;
pub use error::CliError;
