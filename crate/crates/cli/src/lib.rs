//! Command-line front end for `sqzopto`: TOML configuration, subcommands and
//! CSV output.

pub mod commands;
pub mod config;
pub mod output;
pub mod quantity;

pub use commands::{exit, CliError};
pub use config::{resolve, ConfigError, Overrides, Resolved, RunConfig};
