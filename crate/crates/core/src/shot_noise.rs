//! Photon-counting Monte Carlo of the post-selected readout.
//!
//! Each trial draws the number of photons leaving the dark port from
//! `Binomial(N, p_dark)` and then splits them between D1 and D2 with
//! `Binomial(n_dark, P(R))`. Trial `i` of seed `s` always uses ChaCha8 stream
//! `i` keyed by `s`, so results do not depend on how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optics::DetectorConfig;
use crate::readout::{circular_probabilities, invert_asymmetry};
use crate::weak::PostSelectedOutcome;

/// Photon counts of one integration window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub n_in: u64,
    pub n_bright: u64,
    pub n_d1: u64,
    pub n_d2: u64,
}

impl Counts {
    pub fn n_post_selected(&self) -> u64 {
        self.n_d1 + self.n_d2
    }
}

/// Per-trial random stream.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn binomial(n: u64, p: f64, rng: &mut ChaCha8Rng) -> u64 {
    // rand_distr rejects p outside [0,1]; rounding can leave 1 + ε
    let p = p.clamp(0.0, 1.0);
    Binomial::new(n, p).expect("p clamped to [0,1]").sample(rng)
}

/// Nested binomial draw for one trial.
pub fn sample_counts(n_in: u64, p_dark: f64, p_r: f64, seed: u64, trial_index: u64) -> Counts {
    let mut rng = trial_rng(seed, trial_index);
    let n_dark = binomial(n_in, p_dark, &mut rng);
    let n_d1 = binomial(n_dark, p_r, &mut rng);
    Counts {
        n_in,
        n_bright: n_in - n_dark,
        n_d1,
        n_d2: n_dark - n_d1,
    }
}

/// One Monte Carlo trial; estimator fields are `None` for excluded trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub counts: Counts,
    pub estimator: Option<f64>,
    pub inferred_phase: Option<f64>,
    pub inferred_strain: Option<f64>,
    /// Estimator at the edge of `asin`'s domain.
    pub clamped: bool,
}

impl TrialRecord {
    pub fn excluded(&self) -> bool {
        self.estimator.is_none()
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
}

impl Moments {
    /// Two-pass over `values` in the given order.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEnsemble {
    pub seed: u64,
    pub n_trials: usize,
    /// Photons entering per trial (after detection efficiency).
    pub n_photons_in: u64,
    pub success_probability: f64,
    pub prob_r: f64,
    /// Summed over all trials.
    pub n_post_selected: u64,
    pub n_d1: u64,
    pub n_d2: u64,
    pub n_excluded: usize,
    pub n_clamped: usize,
    pub estimator_mean: f64,
    /// Standard error of `estimator_mean`.
    pub estimator_stderr: f64,
    /// Per-trial spread of the estimator.
    pub estimator_std: f64,
    pub phase: Moments,
    pub strain: Moments,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRun {
    pub ensemble: McEnsemble,
    pub trials: Vec<TrialRecord>,
}

/// Runs `n_trials` independent integration windows of the readout.
///
/// Trials run on the rayon pool; the result is bit-identical for any pool
/// size.
pub fn run_shot_noise_mc(
    outcome: &PostSelectedOutcome,
    config: &DetectorConfig,
    seed: u64,
    n_trials: usize,
) -> Result<McRun> {
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    if !(outcome.success_probability > 0.0) {
        return Err(Error::NoPostSelectedLight);
    }
    let ps = config.post_selection()?;
    ps.amplification()?;
    let n_in = config.photon_count()?;
    let p_dark = outcome.success_probability;
    let (p_r, _) = circular_probabilities(&outcome.pointer);

    let trials: Vec<TrialRecord> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let counts = sample_counts(n_in, p_dark, p_r, seed, i);
            let n = counts.n_post_selected();
            if n == 0 {
                return TrialRecord {
                    trial_index: i,
                    counts,
                    estimator: None,
                    inferred_phase: None,
                    inferred_strain: None,
                    clamped: false,
                };
            }
            let est = (counts.n_d1 as f64 - counts.n_d2 as f64) / n as f64;
            let (phase, strain, clamped) = invert_asymmetry(est, &ps, config);
            TrialRecord {
                trial_index: i,
                counts,
                estimator: Some(est),
                inferred_phase: Some(phase),
                inferred_strain: Some(strain),
                clamped,
            }
        })
        .collect();

    let valid: Vec<&TrialRecord> = trials.iter().filter(|t| !t.excluded()).collect();
    let n_excluded = n_trials - valid.len();
    if valid.is_empty() {
        return Err(Error::AllTrialsExcluded {
            excluded: n_excluded,
            n_trials,
        });
    }
    let column = |f: fn(&TrialRecord) -> Option<f64>| -> Vec<f64> {
        valid.iter().map(|t| f(t).expect("valid trial")).collect()
    };
    let est = Moments::of(&column(|t| t.estimator));

    let ensemble = McEnsemble {
        seed,
        n_trials,
        n_photons_in: n_in,
        success_probability: p_dark,
        prob_r: p_r,
        n_post_selected: trials.iter().map(|t| t.counts.n_post_selected()).sum(),
        n_d1: trials.iter().map(|t| t.counts.n_d1).sum(),
        n_d2: trials.iter().map(|t| t.counts.n_d2).sum(),
        n_excluded,
        n_clamped: trials.iter().filter(|t| t.clamped).count(),
        estimator_mean: est.mean,
        estimator_stderr: est.std / (valid.len() as f64).sqrt(),
        estimator_std: est.std,
        phase: Moments::of(&column(|t| t.inferred_phase)),
        strain: Moments::of(&column(|t| t.inferred_strain)),
    };
    Ok(McRun { ensemble, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{phase_from_strain, GwSignal};
    use crate::readout::ideal_readout;
    use crate::state::PolarizationState;
    use crate::weak::{weak_measurement, PostSelection as Ps};

    /// Config whose photon budget floors to exactly `n`.
    fn config_with_photons(n: u64) -> DetectorConfig {
        let mut c = DetectorConfig::default();
        c.input_power =
            (n as f64 + 0.5) * c.photon_energy() / (c.integration_time * c.detection_efficiency);
        assert_eq!(c.photon_count().unwrap(), n);
        c
    }

    #[test]
    fn deterministic_limit() {
        let outcome = PostSelectedOutcome {
            pointer: PolarizationState::right(),
            success_probability: 1.0,
            relative_phase: std::f64::consts::FRAC_PI_2,
            signal: None,
        };
        let run = run_shot_noise_mc(&outcome, &config_with_photons(50), 7, 100).unwrap();
        assert!(run
            .trials
            .iter()
            .all(|t| t.estimator == Some(1.0) && t.clamped));
        assert_eq!(run.ensemble.estimator_mean, 1.0);
        assert_eq!(run.ensemble.estimator_stderr, 0.0);
        assert_eq!(run.ensemble.n_clamped, 100);
    }

    #[test]
    fn count_conservation() {
        for i in 0..2000 {
            let c = sample_counts(37, 0.3, 0.6, 11, i);
            assert_eq!(c.n_in, c.n_bright + c.n_d1 + c.n_d2);
        }
    }

    #[test]
    fn excluded_trials_are_reported() {
        let c = config_with_photons(3);
        let out = weak_measurement(0.0, &c.post_selection().unwrap()).unwrap();
        // p_dark ≈ 2.5e-5 with 3 photons: nearly every trial is dark
        match run_shot_noise_mc(&out, &c, 1, 200) {
            Err(Error::AllTrialsExcluded { excluded, n_trials }) => {
                assert_eq!((excluded, n_trials), (200, 200))
            }
            Ok(run) => assert!(run.ensemble.n_excluded > 150),
            Err(e) => panic!("{e}"),
        }
        let c = config_with_photons(20);
        let out = weak_measurement(0.3, &Ps::from_delta(0.3).unwrap()).unwrap();
        let run = run_shot_noise_mc(&out, &c, 3, 5000).unwrap();
        let excluded = run.trials.iter().filter(|t| t.excluded()).count();
        assert!(excluded > 0);
        assert_eq!(run.ensemble.n_excluded, excluded);
        assert!(run
            .trials
            .iter()
            .filter(|t| t.excluded())
            .all(|t| t.counts.n_post_selected() == 0));
    }

    #[test]
    fn balanced_split_has_binomial_spread() {
        let outcome = PostSelectedOutcome {
            pointer: PolarizationState::h(),
            success_probability: 0.5,
            relative_phase: 0.0,
            signal: None,
        };
        let c = config_with_photons(20_000);
        let run = run_shot_noise_mc(&outcome, &c, 99, 4000).unwrap();
        let e = &run.ensemble;
        assert!(e.estimator_mean.abs() < 4.0 * e.estimator_stderr);
        let per_trial = 1.0 / (e.n_post_selected as f64 / e.n_trials as f64).sqrt();
        assert!((e.estimator_std / per_trial - 1.0).abs() < 0.05);
    }

    #[test]
    fn phase_spread_matches_shot_noise() {
        let mut c = config_with_photons(0);
        // N·P ≈ 2e4 post-selected photons per trial
        c.input_power = 2e4 / 2.475e-5 * c.photon_energy() / c.detection_efficiency;
        let theta = phase_from_strain(&GwSignal::new(1e-17).unwrap(), &c);
        let out = weak_measurement(theta, &c.post_selection().unwrap()).unwrap();
        let run = run_shot_noise_mc(&out, &c, 5, 10_000).unwrap();
        let mean_n = run.ensemble.n_post_selected as f64 / 10_000.0;
        let ratio = run.ensemble.phase.std * mean_n.sqrt();
        assert!((ratio - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn noiseless_consistency() {
        let mut c = DetectorConfig::default();
        // N·P ≈ 1e6
        c.input_power = 1e6 / 2.475e-5 * c.photon_energy() / c.detection_efficiency;
        let theta = phase_from_strain(&GwSignal::new(3e-18).unwrap(), &c);
        let out = weak_measurement(theta, &c.post_selection().unwrap()).unwrap();
        let ideal = ideal_readout(&out, &c).unwrap();
        let run = run_shot_noise_mc(&out, &c, 2024, 1000).unwrap();
        let bias = (run.ensemble.estimator_mean - ideal.asymmetry).abs();
        assert!(bias < 3.0 * run.ensemble.estimator_stderr, "bias {bias:e}");
    }

    #[test]
    fn same_seed_same_ensemble_any_pool() {
        let c = config_with_photons(10_000);
        let out = weak_measurement(1e-3, &Ps::from_delta(0.05).unwrap()).unwrap();
        let reference = run_shot_noise_mc(&out, &c, 42, 3000).unwrap();
        for threads in [1, 3, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let run = pool.install(|| run_shot_noise_mc(&out, &c, 42, 3000).unwrap());
            assert_eq!(run, reference);
        }
        assert_ne!(run_shot_noise_mc(&out, &c, 43, 3000).unwrap(), reference);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let c = config_with_photons(10);
        let out = weak_measurement(1e-3, &Ps::from_delta(0.05).unwrap()).unwrap();
        assert_eq!(run_shot_noise_mc(&out, &c, 1, 0), Err(Error::NoTrials));
        assert!(matches!(
            run_shot_noise_mc(&out, &DetectorConfig::default(), 1, 1),
            Err(Error::PhotonBudgetOverflow(_))
        ));
    }
}
