use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize null state")]
    NullState,

    /// Post-selection probability fell below the representable floor.
    #[error("dark-port null: post-selection probability {probability:e} is zero")]
    DarkPortNull { probability: f64 },

    #[error("gamma undefined at perfectly dark port")]
    GammaUndefined,

    #[error("infinite amplification approximation invalid (post_select_delta = 0)")]
    InfiniteAmplification,

    #[error("no post-selected light")]
    NoPostSelectedLight,

    #[error("{key} must be in {range} (got {value})")]
    OutOfRange {
        key: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("invalid post-selection coefficients: {0}")]
    InvalidPostSelection(String),

    #[error("strain {0:e} outside the weak-signal regime |h| < 1e-3")]
    StrainOutOfRange(f64),

    #[error("photon budget {0:e} exceeds the simulable range (u64)")]
    PhotonBudgetOverflow(f64),

    #[error("n_trials must be at least 1")]
    NoTrials,

    #[error("no trial collected post-selected photons ({excluded} of {n_trials} excluded)")]
    AllTrialsExcluded { excluded: usize, n_trials: usize },

    #[error(
        "search range does not bracket SNR = 1: SNR({upper:e}) = {snr_upper} (lower end 0 has SNR 0)"
    )]
    NonBracketing { upper: f64, snr_upper: f64 },

    #[error("unknown sweep axis `{axis}`; valid axes: {valid}")]
    UnknownAxis { axis: String, valid: String },

    #[error("sweep grid must be non-empty and strictly monotone")]
    NonMonotoneGrid,

    #[error("the two forms of the h_min expression disagree: {first:e} vs {second:e}")]
    FormMismatch { first: f64, second: f64 },
}
