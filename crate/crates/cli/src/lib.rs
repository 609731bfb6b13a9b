//! Batch front end for `wvagw`: configuration files, result files, plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod plot;

pub use config::{parse_config, parse_config_str, ResolvedConfig};
pub use error::CliError;
pub use manifest::{Command, Format, RunManifest};
