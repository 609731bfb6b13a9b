//! Dark-port post-selection and the amplified polarization phase.
//!
//! Projecting the path onto `t|u⟩ − r|d⟩` leaves the pointer
//!
//! ```text
//! aH ∝ t·e^{iθ} − r·e^{−iθ} = (t − r)·cos θ + i·(t + r)·sin θ
//! aV ∝ conj(aH)
//! ```
//!
//! so `arg(aH) = θ + γ` with `tan γ = sin 2θ / (t/r − cos 2θ)`, and the
//! relative phase of the pointer is `Δ = arg(aV) − arg(aH) = −2(θ + γ)`.
//! Equivalently `tan(θ + γ) = (2A + 1)·tan θ` with `A = 1/δ`, which is what
//! [`theta_from_relative_phase`] inverts. For `2θ ≪ δ`, `|Δ| ≈ 2γ ≈ 2A·2θ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optics::{apply_pmi, prepare_input};
use crate::state::{Amplitude, JointState, PolarizationState, PureState};

/// Post-selection probabilities below this are treated as a perfectly dark port.
pub const DARK_PORT_FLOOR: f64 = 1e-300;

/// Real beam-splitter coefficients of the post-selected path state
/// `t|u⟩ − r|d⟩`, with `t² + r² = 1` and `t/r = 1 + δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostSelection {
    t: f64,
    r: f64,
    delta: f64,
}

impl PostSelection {
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::OutOfRange {
                key: "post_select_delta",
                range: "[0,inf)",
                value: delta,
            });
        }
        let ratio = 1.0 + delta;
        let r = 1.0 / ratio.hypot(1.0);
        Ok(Self {
            t: ratio * r,
            r,
            delta,
        })
    }

    /// Checks `t² + r² = 1` to 1e-12 and `t ≥ r`.
    pub fn from_coefficients(t: f64, r: f64) -> Result<Self> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !(in_unit(t) && in_unit(r)) {
            return Err(Error::InvalidPostSelection(format!(
                "t = {t} and r = {r} must lie in (0,1)"
            )));
        }
        if (t * t + r * r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPostSelection(format!(
                "t² + r² = {} is not 1",
                t * t + r * r
            )));
        }
        if t < r {
            return Err(Error::InvalidPostSelection(format!(
                "t = {t} < r = {r} gives negative delta"
            )));
        }
        Ok(Self {
            t,
            r,
            delta: (t - r) / r,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `A = 1/δ`.
    pub fn amplification(&self) -> Result<f64> {
        if self.delta > 0.0 {
            Ok(1.0 / self.delta)
        } else {
            Err(Error::InfiniteAmplification)
        }
    }

    /// `(t − r)/(t + r) = δ/(2 + δ) = 1/(2A + 1)`.
    pub fn contrast(&self) -> f64 {
        self.delta / (2.0 + self.delta)
    }

    /// Path coefficients `(t, −r)` of the dark-port state.
    pub fn dark_port(&self) -> (Amplitude, Amplitude) {
        (Amplitude::new(self.t, 0.0), Amplitude::new(-self.r, 0.0))
    }

    /// Path coefficients `(r, t)` of the bright-port state.
    pub fn bright_port(&self) -> (Amplitude, Amplitude) {
        (Amplitude::new(self.r, 0.0), Amplitude::new(self.t, 0.0))
    }
}

/// Phases of the chain for a known imprint `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalPhases {
    pub theta: f64,
    pub gamma_exact: f64,
    /// `None` when `δ = 0`.
    pub gamma_approx: Option<f64>,
}

/// Normalized pointer after the dark port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostSelectedOutcome {
    #[serde(skip)]
    pub pointer: PolarizationState,
    pub success_probability: f64,
    /// `arg(aV·conj(aH))`, in `(−π, π]`.
    pub relative_phase: f64,
    /// Filled by [`weak_measurement`]; absent for arbitrary input states.
    pub signal: Option<SignalPhases>,
}

/// Projects the path of `state` onto the dark port.
///
/// Fails with [`Error::DarkPortNull`] when no light reaches the dark port.
pub fn post_select(state: &JointState, ps: &PostSelection) -> Result<PostSelectedOutcome> {
    let (up, down) = ps.dark_port();
    let raw = state.project_path(up, down);
    let probability = raw.norm_sqr();
    if !(probability >= DARK_PORT_FLOOR) {
        return Err(Error::DarkPortNull { probability });
    }
    let (pointer, _) = raw
        .normalize()
        .map_err(|_| Error::DarkPortNull { probability })?;
    Ok(PostSelectedOutcome {
        pointer,
        success_probability: probability.min(1.0),
        relative_phase: pointer.relative_phase(),
        signal: None,
    })
}

/// Probability of the complementary (bright) port `r|u⟩ + t|d⟩`.
pub fn bright_port_probability(state: &JointState, ps: &PostSelection) -> f64 {
    let (up, down) = ps.bright_port();
    state.path_probability(up, down)
}

/// Closed-form dark-port probability for the imprinted input:
/// `((t − r)² + 4tr·sin²θ)/2`.
pub fn success_probability(theta: f64, ps: &PostSelection) -> f64 {
    let (t, r) = (ps.t, ps.r);
    let s = theta.sin();
    ((t - r).powi(2) + 4.0 * t * r * s * s) / 2.0
}

/// `γ = atan2(sin 2θ, t/r − cos 2θ)`.
///
/// The denominator is evaluated as `δ + 2 sin²θ` so that neither `t/r` nor
/// `cos 2θ` is ever rounded near 1.
pub fn gamma_exact(theta: f64, ps: &PostSelection) -> Result<f64> {
    let s = theta.sin();
    let num = (2.0 * theta).sin();
    let den = ps.delta + 2.0 * s * s;
    if num == 0.0 && den == 0.0 {
        return Err(Error::GammaUndefined);
    }
    Ok(num.atan2(den))
}

/// First-order amplification `γ ≈ A·2θ`.
pub fn gamma_approx(theta: f64, ps: &PostSelection) -> Result<f64> {
    Ok(ps.amplification()? * 2.0 * theta)
}

/// Recovers `θ` from the pointer's relative phase, exactly:
/// `θ = atan(tan(−Δ/2)/(2A + 1))`.
pub fn theta_from_relative_phase(delta_phase: f64, ps: &PostSelection) -> f64 {
    ((-delta_phase / 2.0).tan() * ps.contrast()).atan()
}

/// Prepares the input, imprints `θ` and post-selects.
pub fn weak_measurement(theta: f64, ps: &PostSelection) -> Result<PostSelectedOutcome> {
    let gamma_exact = gamma_exact(theta, ps)?;
    let state = apply_pmi(&prepare_input(), theta);
    let mut outcome = post_select(&state, ps)?;
    outcome.signal = Some(SignalPhases {
        theta,
        gamma_exact,
        gamma_approx: gamma_approx(theta, ps).ok(),
    });
    Ok(outcome)
}
