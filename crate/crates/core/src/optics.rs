//! From physical parameters to the photon state that reaches the second beam
//! splitter.
//!
//! Sign convention: a positive strain stretches the H-arm of the PMI on the
//! `u` side, which shows up as `e^{+iθ}` on `u⊗H`. The PMI on the `d` side is
//! its mirror image, so the joint phase operator is
//! `diag(e^{+iθ}, e^{−iθ}, e^{−iθ}, e^{+iθ})` in `u⊗H, u⊗V, d⊗H, d⊗V` order.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Amplitude, JointState, PolarizationState};
use crate::weak::PostSelection;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Every physical and optical parameter of one detector.
///
/// Serialized field names are also the configuration-file keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Arm length, m.
    #[serde(rename = "arm_length_L")]
    pub arm_length: f64,
    /// Laser wavelength, m.
    #[serde(rename = "wavelength_lambda")]
    pub wavelength: f64,
    /// Power-recycling mirror transmissivity.
    #[serde(rename = "power_recycle_T")]
    pub power_recycle_t: f64,
    /// Arm-cavity input test mass transmissivity.
    #[serde(rename = "arm_input_T_tilde")]
    pub arm_input_t: f64,
    /// `δ` in `t/r = 1 + δ`.
    pub post_select_delta: f64,
    /// W.
    pub input_power: f64,
    /// s.
    #[serde(rename = "integration_time_tau")]
    pub integration_time: f64,
    pub detection_efficiency: f64,
    /// Static arm-length offset of the DC-readout comparator, m.
    #[serde(rename = "dc_arm_asymmetry_dl")]
    pub dc_arm_asymmetry: f64,
    /// Leak intensity of the DC-readout comparator, W.
    #[serde(rename = "dc_leak_intensity_Id")]
    pub dc_leak_intensity: f64,
}

/// A parameter of [`DetectorConfig`] addressable by its configuration key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigKey {
    pub name: &'static str,
    /// Human-readable valid range.
    pub range: &'static str,
    lower: Bound,
    upper: Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Open(i8),
    Closed(i8),
    Unbounded,
}

impl ConfigKey {
    const fn new(name: &'static str, range: &'static str, lower: Bound, upper: Bound) -> Self {
        Self {
            name,
            range,
            lower,
            upper,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        let lo = match self.lower {
            Bound::Open(b) => value > b as f64,
            Bound::Closed(b) => value >= b as f64,
            Bound::Unbounded => true,
        };
        let hi = match self.upper {
            Bound::Open(b) => value < b as f64,
            Bound::Closed(b) => value <= b as f64,
            Bound::Unbounded => true,
        };
        value.is_finite() && lo && hi
    }

    pub fn check(&self, value: f64) -> Result<f64> {
        if self.contains(value) {
            Ok(value)
        } else {
            Err(Error::OutOfRange {
                key: self.name,
                range: self.range,
                value,
            })
        }
    }
}

use Bound::{Closed, Open, Unbounded};

/// Configuration keys in declaration order.
pub const CONFIG_KEYS: [ConfigKey; 10] = [
    ConfigKey::new("arm_length_L", "(0,inf)", Open(0), Unbounded),
    ConfigKey::new("wavelength_lambda", "(0,inf)", Open(0), Unbounded),
    ConfigKey::new("power_recycle_T", "(0,1)", Open(0), Open(1)),
    ConfigKey::new("arm_input_T_tilde", "(0,1)", Open(0), Open(1)),
    ConfigKey::new("post_select_delta", "[0,inf)", Closed(0), Unbounded),
    ConfigKey::new("input_power", "(0,inf)", Open(0), Unbounded),
    ConfigKey::new("integration_time_tau", "(0,inf)", Open(0), Unbounded),
    ConfigKey::new("detection_efficiency", "(0,1]", Open(0), Closed(1)),
    ConfigKey::new("dc_arm_asymmetry_dl", "[0,inf)", Closed(0), Unbounded),
    ConfigKey::new("dc_leak_intensity_Id", "[0,inf)", Closed(0), Unbounded),
];

impl Default for DetectorConfig {
    /// Advanced-LIGO-class numbers: 4 km arms, 1064 nm, 125 W, 1 s, T = T̃ =
    /// 0.014, δ = 0.01 (A = 100), 90 % detection efficiency, 10 pm DC offset.
    fn default() -> Self {
        Self::ligo_like()
    }
}

impl DetectorConfig {
    pub const fn ligo_like() -> Self {
        Self {
            arm_length: 4000.0,
            wavelength: 1064e-9,
            power_recycle_t: 0.014,
            arm_input_t: 0.014,
            post_select_delta: 0.01,
            input_power: 125.0,
            integration_time: 1.0,
            detection_efficiency: 0.9,
            dc_arm_asymmetry: 1e-11,
            dc_leak_intensity: 0.0,
        }
    }

    pub fn key(name: &str) -> Option<&'static ConfigKey> {
        CONFIG_KEYS.iter().find(|k| k.name == name)
    }

    pub fn key_names() -> impl Iterator<Item = &'static str> {
        CONFIG_KEYS.iter().map(|k| k.name)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "arm_length_L" => self.arm_length,
            "wavelength_lambda" => self.wavelength,
            "power_recycle_T" => self.power_recycle_t,
            "arm_input_T_tilde" => self.arm_input_t,
            "post_select_delta" => self.post_select_delta,
            "input_power" => self.input_power,
            "integration_time_tau" => self.integration_time,
            "detection_efficiency" => self.detection_efficiency,
            "dc_arm_asymmetry_dl" => self.dc_arm_asymmetry,
            "dc_leak_intensity_Id" => self.dc_leak_intensity,
            _ => return None,
        })
    }

    /// Sets a field by key without validation. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "arm_length_L" => &mut self.arm_length,
            "wavelength_lambda" => &mut self.wavelength,
            "power_recycle_T" => &mut self.power_recycle_t,
            "arm_input_T_tilde" => &mut self.arm_input_t,
            "post_select_delta" => &mut self.post_select_delta,
            "input_power" => &mut self.input_power,
            "integration_time_tau" => &mut self.integration_time,
            "detection_efficiency" => &mut self.detection_efficiency,
            "dc_arm_asymmetry_dl" => &mut self.dc_arm_asymmetry,
            "dc_leak_intensity_Id" => &mut self.dc_leak_intensity,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        assert!(self.set(key, value), "unknown config key {key}");
        self
    }

    pub fn validate(&self) -> Result<()> {
        for key in &CONFIG_KEYS {
            key.check(self.get(key.name).expect("every key is readable"))?;
        }
        Ok(())
    }

    /// Optical wavenumber `2π/λ`, 1/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Photon energy `ħω`, J.
    pub fn photon_energy(&self) -> f64 {
        HBAR * self.wavenumber() * SPEED_OF_LIGHT
    }

    /// Detected-photon budget per integration time before post-selection,
    /// `input_power·τ/ħω · η`, not yet floored.
    pub fn photon_budget(&self) -> f64 {
        self.input_power * self.integration_time / self.photon_energy() * self.detection_efficiency
    }

    /// [`photon_budget`](Self::photon_budget) floored to a count.
    pub fn photon_count(&self) -> Result<u64> {
        let n = self.photon_budget().floor();
        // u64::MAX as f64 rounds up to 2^64
        if !(0.0..u64::MAX as f64).contains(&n) {
            return Err(Error::PhotonBudgetOverflow(n));
        }
        Ok(n as u64)
    }

    pub fn post_selection(&self) -> Result<PostSelection> {
        PostSelection::from_delta(self.post_select_delta)
    }
}

/// Quasi-static `h₊` strain at normal incidence.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GwSignal {
    strain: f64,
}

impl GwSignal {
    pub const MAX_STRAIN: f64 = 1e-3;

    pub fn new(strain: f64) -> Result<Self> {
        if !strain.is_finite() || strain.abs() >= Self::MAX_STRAIN {
            return Err(Error::StrainOutOfRange(strain));
        }
        Ok(Self { strain })
    }

    pub fn strain(&self) -> f64 {
        self.strain
    }

    /// Per-arm length change `ΔL = hL/2`.
    pub fn arm_length_change(&self, config: &DetectorConfig) -> f64 {
        self.strain * config.arm_length / 2.0
    }
}

/// Power-recycling and arm-cavity gains `(G_p, G_arm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gains {
    pub power_recycling: f64,
    pub arm: f64,
}

impl Gains {
    pub fn combined(&self) -> f64 {
        self.power_recycling * self.arm
    }
}

/// `G_p = 2/T`, `G_arm = 2/√T̃`.
pub fn gains(config: &DetectorConfig) -> Gains {
    Gains {
        power_recycling: 2.0 / config.power_recycle_t,
        arm: 2.0 / config.arm_input_t.sqrt(),
    }
}

/// `(1 + R)/T` with `R = 1 − T`; [`gains`] keeps its `R → 1` limit.
pub fn power_recycling_gain_reflective(config: &DetectorConfig) -> f64 {
    (2.0 - config.power_recycle_t) / config.power_recycle_t
}

/// Phase imprinted per PMI: `θ = 2·G_p·G_arm·k·ΔL`.
pub fn phase_from_strain(signal: &GwSignal, config: &DetectorConfig) -> f64 {
    2.0 * gains(config).combined() * config.wavenumber() * signal.arm_length_change(config)
}

/// Inverse of [`phase_from_strain`]: `h = θ / (G_p·G_arm·k·L)`.
pub fn strain_from_phase(theta: f64, config: &DetectorConfig) -> f64 {
    theta / (gains(config).combined() * config.wavenumber() * config.arm_length)
}

/// `(|u⟩ + |d⟩)/√2 ⊗ |+⟩`: the state after the first beam splitter.
pub fn prepare_input() -> JointState {
    let half = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    JointState::product(half, half, &PolarizationState::plus())
}

/// Diagonal phase imprint of the two mirror-image PMIs.
pub fn apply_pmi(state: &JointState, theta: f64) -> JointState {
    let plus = Amplitude::cis(theta);
    let minus = plus.conj();
    let [uh, uv, dh, dv] = state.to_array();
    JointState::new([uh * plus, uv * minus, dh * minus, dv * plus])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{projector_probability, PureState};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gains_examples() {
        let c = DetectorConfig::default()
            .with("power_recycle_T", 0.02)
            .with("arm_input_T_tilde", 0.01);
        let g = gains(&c);
        assert_relative_eq!(g.power_recycling, 100.0, max_relative = 1e-15);
        assert_relative_eq!(g.arm, 20.0, max_relative = 1e-15);
        assert_relative_eq!(g.combined(), 2000.0, max_relative = 1e-15);
        assert_relative_eq!(
            power_recycling_gain_reflective(&c),
            99.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn phase_from_strain_examples() {
        let c = DetectorConfig::default()
            .with("power_recycle_T", 0.02)
            .with("arm_input_T_tilde", 0.01);
        assert_eq!(phase_from_strain(&GwSignal::new(0.0).unwrap(), &c), 0.0);

        // 2·2000·(2π/1.064e-6)·2e-18, evaluated to 40 digits
        let theta = phase_from_strain(&GwSignal::new(1e-21).unwrap(), &c);
        assert_relative_eq!(theta, 4.724_199_479_082_396e-8, max_relative = 1e-13);

        let doubled = c.with("power_recycle_T", 0.01);
        let theta2 = phase_from_strain(&GwSignal::new(1e-21).unwrap(), &doubled);
        assert_relative_eq!(theta2, 2.0 * theta, max_relative = 1e-15);

        let neg = phase_from_strain(&GwSignal::new(-1e-21).unwrap(), &c);
        assert_eq!(neg, -theta);
        assert_relative_eq!(strain_from_phase(theta, &c), 1e-21, max_relative = 1e-14);
    }

    #[test]
    fn strain_guard() {
        assert!(GwSignal::new(1e-3).is_err());
        assert!(GwSignal::new(f64::NAN).is_err());
        assert!(GwSignal::new(-9e-4).is_ok());
    }

    #[test]
    fn input_state_is_balanced_plus() {
        let s = prepare_input();
        for a in s.amplitudes() {
            assert_relative_eq!(a.re, 0.5, max_relative = 1e-15);
            assert_eq!(a.im, 0.0);
        }
        let one = Amplitude::new(1.0, 0.0);
        let zero = Amplitude::new(0.0, 0.0);
        assert_relative_eq!(s.path_probability(one, zero), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            s.polarization_probability(&PolarizationState::plus()),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            projector_probability(
                &s,
                &JointState::product(
                    Amplitude::new(FRAC_1_SQRT_2, 0.0),
                    Amplitude::new(FRAC_1_SQRT_2, 0.0),
                    &PolarizationState::plus()
                )
            ),
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn pmi_identity_and_inverse() {
        let s = prepare_input();
        assert_eq!(apply_pmi(&s, 0.0), s);
        let back = apply_pmi(&apply_pmi(&s, 0.37), -0.37);
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn validation_names_key_and_range() {
        let err = DetectorConfig::default()
            .with("power_recycle_T", 1.5)
            .validate()
            .unwrap_err();
        assert_eq!(
            err.to_string(),
            "power_recycle_T must be in (0,1) (got 1.5)"
        );
        assert!(DetectorConfig::default()
            .with("detection_efficiency", 1.0)
            .validate()
            .is_ok());
        assert!(DetectorConfig::default()
            .with("post_select_delta", 0.0)
            .validate()
            .is_ok());
        assert!(DetectorConfig::default()
            .with("input_power", 0.0)
            .validate()
            .is_err());
        assert!(DetectorConfig::default().validate().is_ok());
    }

    #[test]
    fn photon_count_overflow() {
        assert!(DetectorConfig::default().photon_count().is_err());
        let desk = DetectorConfig::default().with("input_power", 1e-8);
        let n = desk.photon_count().unwrap();
        assert!((4.8e10..4.9e10).contains(&(n as f64)));
    }

    fn arb_joint() -> impl Strategy<Value = JointState> {
        proptest::array::uniform4((-1.0..1.0f64, -1.0..1.0f64))
            .prop_filter("non-null", |a| {
                a.iter().any(|(x, y)| x.abs() + y.abs() > 1e-3)
            })
            .prop_map(|a| {
                JointState::new(a.map(|(re, im)| Amplitude::new(re, im)))
                    .normalize()
                    .unwrap()
                    .0
            })
    }

    proptest! {
        #[test]
        fn pmi_is_unitary(s in arb_joint(), theta in -10.0..10.0f64) {
            prop_assert!((apply_pmi(&s, theta).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pmi_mirror_symmetry(s in arb_joint(), theta in -3.0..3.0f64) {
            let lhs = apply_pmi(&s.swap_paths(), -theta);
            let rhs = apply_pmi(&s, theta).swap_paths();
            for (a, b) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-15);
            }
        }

        #[test]
        fn phase_linear_in_strain(h in -9e-4..9e-4f64, k in -1.0..1.0f64) {
            let c = DetectorConfig::default();
            let a = phase_from_strain(&GwSignal::new(h).unwrap(), &c);
            let b = phase_from_strain(&GwSignal::new(h * k).unwrap(), &c);
            prop_assert!((b - k * a).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }
}
