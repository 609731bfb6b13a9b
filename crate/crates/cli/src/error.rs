use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Physics(wvagw::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{} exists; pass --force to overwrite", .0.display())]
    WouldOverwrite(PathBuf),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 usage, 2 config validation, 3 physics domain, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Config(_) => 2,
            Self::Physics(_) => 3,
            Self::Io { .. } | Self::WouldOverwrite(_) => 4,
        }
    }

    pub fn to_exit_code(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<wvagw::Error> for CliError {
    fn from(e: wvagw::Error) -> Self {
        use wvagw::Error::*;
        match e {
            OutOfRange { .. }
            | InvalidPostSelection(_)
            | StrainOutOfRange(_)
            | PhotonBudgetOverflow(_)
            | NoTrials
            | UnknownAxis { .. }
            | NonMonotoneGrid => Self::Config(e.to_string()),
            NullState
            | DarkPortNull { .. }
            | GammaUndefined
            | InfiniteAmplification
            | NoPostSelectedLight
            | AllTrialsExcluded { .. }
            | NonBracketing { .. }
            | FormMismatch { .. } => Self::Physics(e),
        }
    }
}
