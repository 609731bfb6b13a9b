//! Polarimetric readout of the post-selected pointer and the DC-readout
//! comparator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optics::{strain_from_phase, DetectorConfig};
use crate::state::{projector_probability, PolarizationState};
use crate::weak::{theta_from_relative_phase, PostSelectedOutcome, PostSelection};

/// Detector intensities and what they imply about the strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReadoutResult {
    /// Power on D1 (R port), W.
    pub i1: f64,
    /// Power on D2 (L port), W.
    pub i2: f64,
    /// `(I1 − I2)/(I1 + I2)`.
    pub asymmetry: f64,
    /// `asin(asymmetry)`, rad.
    pub inferred_phase: f64,
    pub inferred_strain: f64,
}

/// `(P(R), P(L))` of a normalized pointer.
pub fn circular_probabilities(pointer: &PolarizationState) -> (f64, f64) {
    (
        projector_probability(pointer, &PolarizationState::right()),
        projector_probability(pointer, &PolarizationState::left()),
    )
}

/// Maps a measured asymmetry back to a strain through the exact chain.
///
/// Returns `(inferred_phase, inferred_strain, clamped)`; `clamped` is set when
/// the asymmetry had to be pulled back into `[−1, 1]` or sits on its edge.
pub fn invert_asymmetry(
    asymmetry: f64,
    ps: &PostSelection,
    config: &DetectorConfig,
) -> (f64, f64, bool) {
    let clamped = !(asymmetry.abs() < 1.0);
    let phase = asymmetry.clamp(-1.0, 1.0).asin();
    let theta = theta_from_relative_phase(phase, ps);
    (phase, strain_from_phase(theta, config), clamped)
}

/// Noiseless R/L readout of a post-selected pointer.
pub fn ideal_readout(
    outcome: &PostSelectedOutcome,
    config: &DetectorConfig,
) -> Result<ReadoutResult> {
    if !(outcome.success_probability > 0.0) {
        return Err(Error::NoPostSelectedLight);
    }
    let ps = config.post_selection()?;
    ps.amplification()?;
    let power = config.input_power * outcome.success_probability * config.detection_efficiency;
    let (p_r, p_l) = circular_probabilities(&outcome.pointer);
    let asymmetry = p_r - p_l;
    let (inferred_phase, inferred_strain, _) = invert_asymmetry(asymmetry, &ps, config);
    Ok(ReadoutResult {
        i1: power * p_r,
        i2: power * p_l,
        asymmetry,
        inferred_phase,
        inferred_strain,
    })
}

/// Advanced-LIGO style DC readout: `I_in·[(kΔl)² + 2kΔl·θ] + I_d`, W.
pub fn dc_readout(theta: f64, config: &DetectorConfig) -> f64 {
    let offset = config.wavenumber() * config.dc_arm_asymmetry;
    config.input_power * (offset * offset + 2.0 * offset * theta) + config.dc_leak_intensity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{phase_from_strain, GwSignal};
    use crate::state::Amplitude;
    use crate::weak::weak_measurement;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

    fn outcome_with_phase(delta_phase: f64) -> PostSelectedOutcome {
        PostSelectedOutcome {
            pointer: PolarizationState::new(
                Amplitude::new(FRAC_1_SQRT_2, 0.0),
                Amplitude::from_polar(FRAC_1_SQRT_2, delta_phase),
            ),
            success_probability: 1e-4,
            relative_phase: delta_phase,
            signal: None,
        }
    }

    #[test]
    fn zero_phase_reads_zero() {
        let r = ideal_readout(&outcome_with_phase(0.0), &DetectorConfig::default()).unwrap();
        assert_eq!(r.asymmetry, 0.0);
        assert_eq!(r.inferred_strain, 0.0);
        assert_eq!(r.i1, r.i2);
    }

    #[test]
    fn asymmetry_of_pi_over_six() {
        let c = DetectorConfig::default();
        let r = ideal_readout(&outcome_with_phase(FRAC_PI_6), &c).unwrap();
        assert!((r.asymmetry - 0.5).abs() < 1e-15);
        assert!((r.inferred_phase - FRAC_PI_6).abs() < 1e-14);
        let total = c.input_power * 1e-4 * c.detection_efficiency;
        assert_relative_eq!(r.i1 + r.i2, total, max_relative = 1e-14);
        assert_relative_eq!(r.i1, 0.75 * total, max_relative = 1e-14);
    }

    #[test]
    fn null_outcome_is_rejected() {
        let mut o = outcome_with_phase(0.1);
        o.success_probability = 0.0;
        let err = ideal_readout(&o, &DetectorConfig::default()).unwrap_err();
        assert_eq!(err.to_string(), "no post-selected light");
    }

    #[test]
    fn strain_round_trip_at_defaults() {
        let c = DetectorConfig::default();
        let ps = c.post_selection().unwrap();
        for h in [1e-21, -3e-22, 5e-19] {
            let theta = phase_from_strain(&GwSignal::new(h).unwrap(), &c);
            let out = weak_measurement(theta, &ps).unwrap();
            let r = ideal_readout(&out, &c).unwrap();
            assert!(
                ((r.inferred_strain - h) / h).abs() < 1e-6,
                "h={h}: {}",
                r.inferred_strain
            );
            assert!((r.asymmetry - out.relative_phase.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn dc_readout_examples() {
        // kΔl = 1e-5
        let mut c = DetectorConfig::default();
        c.input_power = 1.0;
        c.dc_leak_intensity = 0.0;
        c.dc_arm_asymmetry = 1e-5 / c.wavenumber();
        assert_relative_eq!(dc_readout(0.0, &c), 1e-10, max_relative = 1e-12);
        assert_relative_eq!(dc_readout(1e-10, &c), 1e-10 + 2e-15, max_relative = 1e-12);

        let base = dc_readout(0.0, &c);
        let s1 = dc_readout(3e-9, &c) - base;
        let s2 = dc_readout(6e-9, &c) - base;
        assert_relative_eq!(s2, 2.0 * s1, max_relative = 1e-6);

        c.dc_leak_intensity = 2e-3;
        assert_relative_eq!(dc_readout(0.0, &c), 1e-10 + 2e-3, max_relative = 1e-12);
    }

    #[test]
    fn readout_offset_contrast() {
        let c = DetectorConfig::default();
        let out = weak_measurement(0.0, &c.post_selection().unwrap()).unwrap();
        assert_eq!(ideal_readout(&out, &c).unwrap().asymmetry, 0.0);
        assert!(dc_readout(0.0, &c) > 0.0);
        let leaky = DetectorConfig {
            dc_arm_asymmetry: 0.0,
            dc_leak_intensity: 1e-6,
            ..c
        };
        assert!(dc_readout(0.0, &leaky) > 0.0);
    }
}
