use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Noiseless pass through the exact chain
    Simulate,
    /// Shot-noise Monte Carlo ensemble
    Mc,
    /// h_min over a grid of one detector parameter
    Sweep,
    /// h_min at one configuration, both readings
    Sensitivity,
    /// Weak-value readout vs. DC readout
    CompareDc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Weak-value-amplified gravitational-wave detector simulation.
#[derive(Debug, Clone, Parser)]
#[command(name = "wvagw", version)]
pub struct RunManifest {
    #[arg(value_enum)]
    pub command: Command,

    /// Flat `key = value` configuration file
    #[arg(long = "config", value_name = "PATH")]
    pub config_path: PathBuf,

    /// Override a configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Output directory, created if absent
    #[arg(long = "out", value_name = "DIR")]
    pub output_dir: PathBuf,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// Also write SVG plots
    #[arg(long)]
    pub plot: bool,

    /// Overwrite existing output files
    #[arg(long)]
    pub force: bool,
}
