//! Shot-noise-limited minimum detectable strain.
//!
//! The closed form is
//!
//! ```text
//! h_min = 1 / ((2A − 1)·G_p·G_arm·k·L) · √(ħω / ((I1 + I2)·τ))
//!       = T / (4(2A − 1)·k·L) · √(T̃·ħω / ((I1 + I2)·τ))
//! ```
//!
//! where `I1 + I2` is read as the power detected behind the dark port,
//! `input_power · p_dark(θ→0) · η` with `p_dark(0) = (t − r)²/2`. The
//! "optimistic" reading puts the full `input_power · η` there instead.
//!
//! [`h_min_empirical`] measures the same quantity from the photon-counting
//! Monte Carlo without using the closed form.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optics::{gains, phase_from_strain, DetectorConfig, GwSignal};
use crate::shot_noise::run_shot_noise_mc;
use crate::weak::{success_probability, weak_measurement};

/// Both readings of the closed form at one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HminFormula {
    /// Post-selected reading; the headline value.
    pub h_min: f64,
    /// Same reading, evaluated through the `T`, `T̃` form.
    pub h_min_second_form: f64,
    /// `I1 + I2` taken as the full detected input power.
    pub h_min_optimistic: f64,
    pub amplification: f64,
    /// Dark-port probability at zero signal, `(t − r)²/2`.
    pub success_probability: f64,
    /// `I1 + I2` of the post-selected reading, W.
    pub detected_power: f64,
}

pub fn h_min_formula(config: &DetectorConfig) -> Result<HminFormula> {
    config.validate()?;
    let ps = config.post_selection()?;
    let a = ps.amplification()?;
    let gain = 2.0 * a - 1.0;
    if !(gain > 0.0) {
        return Err(Error::OutOfRange {
            key: "post_select_delta",
            range: "(0,2) for a positive 2A-1",
            value: config.post_select_delta,
        });
    }
    let p0 = success_probability(0.0, &ps);
    let detected_power = config.input_power * p0 * config.detection_efficiency;
    let kl = config.wavenumber() * config.arm_length;
    let hw = config.photon_energy();
    let tau = config.integration_time;

    let h_min = (hw / (detected_power * tau)).sqrt() / (gain * gains(config).combined() * kl);
    let h_min_second_form = config.power_recycle_t / (4.0 * gain * kl)
        * (config.arm_input_t * hw / (detected_power * tau)).sqrt();
    if ((h_min - h_min_second_form) / h_min).abs() > 0.01 {
        return Err(Error::FormMismatch {
            first: h_min,
            second: h_min_second_form,
        });
    }
    let h_min_optimistic = h_min * p0.sqrt();

    Ok(HminFormula {
        h_min,
        h_min_second_form,
        h_min_optimistic,
        amplification: a,
        success_probability: p0,
        detected_power,
    })
}

/// Bisection settings for [`h_min_empirical_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSearch {
    /// Upper end of the bracket; the lower end is always `h = 0`.
    /// Defaults to 16× the closed-form estimate.
    pub upper: Option<f64>,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for EmpiricalSearch {
    fn default() -> Self {
        Self {
            upper: None,
            rel_tol: 1e-3,
            max_iter: 200,
        }
    }
}

/// Strain at which the Monte Carlo's inferred-strain SNR crosses 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalHmin {
    pub h_min: f64,
    /// Final bracket `(SNR < 1, SNR ≥ 1)`.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// `|mean| / std` of the inferred strain at strain `h`.
pub fn strain_snr(config: &DetectorConfig, h: f64, seed: u64, n_trials: usize) -> Result<f64> {
    let signal = GwSignal::new(h)?;
    let ps = config.post_selection()?;
    let outcome = weak_measurement(phase_from_strain(&signal, config), &ps)?;
    let run = run_shot_noise_mc(&outcome, config, seed, n_trials)?;
    let s = run.ensemble.strain;
    Ok(snr(s.mean, s.std))
}

fn snr(mean: f64, std: f64) -> f64 {
    if mean == 0.0 {
        0.0
    } else if std == 0.0 {
        f64::INFINITY
    } else {
        mean.abs() / std
    }
}

/// Bisects `[0, upper]` for the smallest `h` with `snr(h) ≥ 1`.
///
/// `snr(0)` is taken to be below 1 by definition of a null signal.
pub fn bisect_snr_crossing<F>(
    mut snr: F,
    upper: f64,
    search: &EmpiricalSearch,
) -> Result<EmpiricalHmin>
where
    F: FnMut(f64) -> Result<f64>,
{
    let snr_upper = snr(upper)?;
    if !(snr_upper >= 1.0) {
        return Err(Error::NonBracketing { upper, snr_upper });
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut evaluations = 1;
    while hi - lo > search.rel_tol * hi && evaluations <= search.max_iter {
        let mid = 0.5 * (lo + hi);
        if snr(mid)? >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        evaluations += 1;
    }
    Ok(EmpiricalHmin {
        h_min: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
    })
}

pub fn h_min_empirical(
    config: &DetectorConfig,
    seed: u64,
    n_trials: usize,
) -> Result<EmpiricalHmin> {
    h_min_empirical_with(config, seed, n_trials, &EmpiricalSearch::default())
}

pub fn h_min_empirical_with(
    config: &DetectorConfig,
    seed: u64,
    n_trials: usize,
    search: &EmpiricalSearch,
) -> Result<EmpiricalHmin> {
    config.validate()?;
    let upper = match search.upper {
        Some(u) => u,
        None => (16.0 * h_min_formula(config)?.h_min).min(0.99 * GwSignal::MAX_STRAIN),
    };
    bisect_snr_crossing(|h| strain_snr(config, h, seed, n_trials), upper, search)
}

/// Monte Carlo budget for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McBudget {
    pub seed: u64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub h_min_formula: f64,
    pub h_min_optimistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_min_mc: Option<f64>,
    pub success_probability: f64,
}

/// Closed-form (and optionally Monte Carlo) sensitivity of one
/// configuration, or of a sweep of one parameter around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub version: &'static str,
    pub parameters: DetectorConfig,
    pub h_min_formula: HminFormula,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_min_mc: Option<EmpiricalHmin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    pub points: Vec<SweepPoint>,
}

/// Sensitivity of a single configuration.
pub fn report(config: &DetectorConfig, mc: Option<McBudget>) -> Result<SensitivityReport> {
    Ok(SensitivityReport {
        version: crate::VERSION,
        parameters: *config,
        h_min_formula: h_min_formula(config)?,
        h_min_mc: mc
            .map(|b| h_min_empirical(config, b.seed, b.n_trials))
            .transpose()?,
        axis: None,
        points: Vec::new(),
    })
}

/// Evaluates the sensitivity at every `grid` value of `axis`.
pub fn sweep(
    config: &DetectorConfig,
    axis: &str,
    grid: &[f64],
    mc: Option<McBudget>,
) -> Result<SensitivityReport> {
    let key = DetectorConfig::key(axis).ok_or_else(|| Error::UnknownAxis {
        axis: axis.to_owned(),
        valid: DetectorConfig::key_names().collect::<Vec<_>>().join(", "),
    })?;
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if grid.is_empty() || !(increasing || decreasing) {
        return Err(Error::NonMonotoneGrid);
    }
    for &v in grid {
        key.check(v)?;
    }

    let points = grid
        .par_iter()
        .map(|&value| {
            let point = config.with(axis, value);
            let formula = h_min_formula(&point)?;
            let h_min_mc = mc
                .map(|b| h_min_empirical(&point, b.seed, b.n_trials).map(|e| e.h_min))
                .transpose()?;
            Ok(SweepPoint {
                value,
                h_min_formula: formula.h_min,
                h_min_optimistic: formula.h_min_optimistic,
                h_min_mc,
                success_probability: formula.success_probability,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SensitivityReport {
        version: crate::VERSION,
        parameters: *config,
        h_min_formula: h_min_formula(config)?,
        h_min_mc: None,
        axis: Some(axis.to_owned()),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn headline_at_ligo_like_defaults() {
        let f = h_min_formula(&DetectorConfig::default()).unwrap();
        // mpmath, 40 digits
        assert_relative_eq!(f.h_min, 7.213_955_799_778_106e-25, max_relative = 2e-3);
        assert_relative_eq!(
            f.h_min_optimistic,
            3.588_988_319_410_024e-27,
            max_relative = 2e-3
        );
        assert_relative_eq!(
            f.success_probability,
            2.475_124_993_812_187_5e-5,
            max_relative = 1e-12
        );
        assert!((f.h_min / 1e-25).log10().abs() < 1.0);
        assert_relative_eq!(f.h_min, f.h_min_second_form, max_relative = 1e-12);
    }

    #[test]
    fn scales_with_integration_time() {
        let c = DetectorConfig::default();
        let h1 = h_min_formula(&c).unwrap().h_min;
        let h4 = h_min_formula(&c.with("integration_time_tau", 4.0))
            .unwrap()
            .h_min;
        assert_relative_eq!(h4, h1 / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn amplification_factor_ratio() {
        // same detected power at both A so only (2A−1) differs
        let at = |delta: f64| {
            let c = DetectorConfig::default().with("post_select_delta", delta);
            let f = h_min_formula(&c).unwrap();
            f.h_min * f.detected_power.sqrt()
        };
        assert_relative_eq!(at(0.01) / at(0.1), 19.0 / 199.0, max_relative = 1e-12);
    }

    #[test]
    fn undefined_without_amplification() {
        let c = DetectorConfig::default().with("post_select_delta", 0.0);
        assert_eq!(h_min_formula(&c), Err(Error::InfiniteAmplification));
        assert!(h_min_formula(&c.with("post_select_delta", 2.5)).is_err());
    }

    #[test]
    fn bisection_deterministic_limit() {
        let r = bisect_snr_crossing(
            |h| Ok(if h > 0.0 { f64::INFINITY } else { 0.0 }),
            1.0,
            &EmpiricalSearch::default(),
        )
        .unwrap();
        assert!(r.h_min < 1e-50);
    }

    #[test]
    fn bisection_finds_linear_crossing() {
        let r = bisect_snr_crossing(
            |h| Ok(h / 3e-20),
            1e-18,
            &EmpiricalSearch {
                rel_tol: 1e-9,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(r.h_min, 3e-20, max_relative = 1e-8);
        assert!(r.bracket.0 < 3e-20 && 3e-20 <= r.bracket.1);
    }

    #[test]
    fn bisection_reports_non_bracketing() {
        let err = bisect_snr_crossing(Ok, 0.5, &EmpiricalSearch::default()).unwrap_err();
        assert_eq!(
            err,
            Error::NonBracketing {
                upper: 0.5,
                snr_upper: 0.5
            }
        );
    }

    #[test]
    fn sweep_errors() {
        let c = DetectorConfig::default();
        let err = sweep(&c, "laser_colour", &[1.0], None).unwrap_err();
        assert!(err.to_string().contains("post_select_delta"));
        assert_eq!(
            sweep(&c, "input_power", &[1.0, 1.0], None),
            Err(Error::NonMonotoneGrid)
        );
        assert_eq!(
            sweep(&c, "input_power", &[], None),
            Err(Error::NonMonotoneGrid)
        );
        assert!(sweep(&c, "power_recycle_T", &[0.5, 1.5], None).is_err());
    }

    #[test]
    fn single_point_sweep_matches_formula() {
        let c = DetectorConfig::default();
        let r = sweep(&c, "input_power", &[125.0], None).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].h_min_formula, h_min_formula(&c).unwrap().h_min);
    }

    #[test]
    fn strictly_decreasing_in_resources() {
        let c = DetectorConfig::default();
        for (axis, grid) in [
            ("arm_length_L", vec![1e3, 2e3, 4e3, 8e3]),
            ("integration_time_tau", vec![0.1, 1.0, 10.0]),
            ("input_power", vec![1.0, 10.0, 125.0, 500.0]),
            ("detection_efficiency", vec![0.2, 0.5, 0.9, 1.0]),
            // increasing A
            ("post_select_delta", vec![0.5, 0.1, 0.01, 1e-3]),
        ] {
            let r = sweep(&c, axis, &grid, None).unwrap();
            assert!(
                r.points
                    .windows(2)
                    .all(|w| w[1].h_min_formula < w[0].h_min_formula),
                "{axis}"
            );
        }
    }
}
