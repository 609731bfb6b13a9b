//! Simulation of an interferometric gravitational-wave detector whose readout
//! uses weak-value amplification.
//!
//! A photon in `(|u⟩ + |d⟩)/√2 ⊗ |+⟩` passes two mirror-image polarization
//! Michelson interferometers that imprint `±θ` on its polarization, is
//! post-selected on the nearly dark port `t|u⟩ − r|d⟩` of a second beam
//! splitter, and has its polarization read out in the circular basis. The
//! crate computes every step exactly on four complex amplitudes, compares the
//! first-order formulas against that exact route, and simulates the photon
//! counting.
//!
//! ```
//! use wvagw::{optics, weak, readout};
//!
//! let config = optics::DetectorConfig::default();
//! let signal = optics::GwSignal::new(1e-21)?;
//! let theta = optics::phase_from_strain(&signal, &config);
//! let outcome = weak::weak_measurement(theta, &config.post_selection()?)?;
//! let result = readout::ideal_readout(&outcome, &config)?;
//! assert!((result.inferred_strain - 1e-21).abs() < 1e-27);
//! # Ok::<(), wvagw::Error>(())
//! ```

pub mod error;
pub mod optics;
pub mod readout;
pub mod sensitivity;
pub mod shot_noise;
pub mod state;
pub mod weak;

pub use error::{Error, Result};

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
