//! One function per subcommand; each returns the files it wants written.

use serde::Serialize;
use serde_json::json;
use wvagw::optics::{gains, phase_from_strain, DetectorConfig};
use wvagw::readout::{dc_readout, ideal_readout};
use wvagw::sensitivity::{self, McBudget};
use wvagw::shot_noise::run_shot_noise_mc;
use wvagw::weak::{weak_measurement, PostSelectedOutcome};

use crate::config::ResolvedConfig;
use crate::error::CliError;
use crate::manifest::{Command, RunManifest};
use crate::output::{fmt_f64, fmt_opt, render_csv, render_json, OutputSet, Provenance, Table};
use crate::plot::{histogram, line_chart, Scale, Series};

/// One noiseless pass through the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunResult {
    pub strain_h: f64,
    pub theta: f64,
    pub success_probability: f64,
    pub gamma_exact: f64,
    pub gamma_approx: Option<f64>,
    pub relative_phase: f64,
    pub i1: f64,
    pub i2: f64,
    pub asymmetry: f64,
    pub inferred_phase: f64,
    pub inferred_strain: f64,
}

pub fn simulate(config: &ResolvedConfig) -> Result<RunResult, CliError> {
    let signal = config.run.signal()?;
    let detector = &config.detector;
    let theta = phase_from_strain(&signal, detector);
    let outcome = weak_measurement(theta, &detector.post_selection()?)?;
    let readout = ideal_readout(&outcome, detector)?;
    let phases = outcome.signal.expect("weak_measurement records the signal");
    Ok(RunResult {
        strain_h: signal.strain(),
        theta,
        success_probability: outcome.success_probability,
        gamma_exact: phases.gamma_exact,
        gamma_approx: phases.gamma_approx,
        relative_phase: outcome.relative_phase,
        i1: readout.i1,
        i2: readout.i2,
        asymmetry: readout.asymmetry,
        inferred_phase: readout.inferred_phase,
        inferred_strain: readout.inferred_strain,
    })
}

/// Row of the DC-readout comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DcComparison {
    pub theta: f64,
    pub wva_asymmetry: f64,
    pub wva_asymmetry_ideal: f64,
    pub dc_intensity: f64,
    pub dc_intensity_ideal: f64,
    pub dc_offset: f64,
    /// `(I_A − offset)/(I_in·(kΔl)²) = 2θ/(kΔl)`; NaN without an offset.
    pub dc_relative_signal: f64,
}

/// WVA readout vs. DC readout over a grid of imprinted phases; "ideal"
/// columns drop the imperfection terms `Δl` and `I_d`.
pub fn compare_dc(config: &DetectorConfig, thetas: &[f64]) -> Result<Vec<DcComparison>, CliError> {
    let ideal = DetectorConfig {
        dc_arm_asymmetry: 0.0,
        dc_leak_intensity: 0.0,
        ..*config
    };
    let ps = config.post_selection()?;
    let k_dl = config.wavenumber() * config.dc_arm_asymmetry;
    let dc_offset = config.input_power * k_dl * k_dl + config.dc_leak_intensity;
    thetas
        .iter()
        .map(|&theta| {
            let outcome = weak_measurement(theta, &ps)?;
            let wva = ideal_readout(&outcome, config)?.asymmetry;
            let wva_ideal = ideal_readout(&outcome, &ideal)?.asymmetry;
            let dc = dc_readout(theta, config);
            let signal = dc - dc_offset;
            Ok(DcComparison {
                theta,
                wva_asymmetry: wva,
                wva_asymmetry_ideal: wva_ideal,
                dc_intensity: dc,
                dc_intensity_ideal: dc_readout(theta, &ideal),
                dc_offset,
                dc_relative_signal: if k_dl > 0.0 {
                    signal / (config.input_power * k_dl * k_dl)
                } else {
                    f64::NAN
                },
            })
        })
        .collect()
}

fn provenance<'a>(
    command: &'static str,
    source: String,
    seed: Option<u64>,
    units: &[(&'static str, &'static str)],
    config: &'a ResolvedConfig,
) -> Provenance<'a> {
    Provenance {
        command,
        source,
        seed,
        units: units.to_vec(),
        config,
    }
}

fn emit(
    out: &mut OutputSet,
    m: &RunManifest,
    stem: &str,
    meta: &Provenance,
    table: &Table,
    body: serde_json::Value,
) {
    if m.format.csv() {
        out.add(format!("{stem}.csv"), render_csv(meta, table));
    }
    if m.format.json() {
        out.add(format!("{stem}.json"), render_json(meta, body));
    }
}

fn cmd_simulate(
    m: &RunManifest,
    config: &ResolvedConfig,
    out: &mut OutputSet,
) -> Result<(), CliError> {
    let r = simulate(config)?;
    let units = [
        ("strain_h", "1"),
        ("theta", "rad"),
        ("success_probability", "1"),
        ("gamma_exact", "rad"),
        ("gamma_approx", "rad"),
        ("relative_phase", "rad"),
        ("i1", "W"),
        ("i2", "W"),
        ("asymmetry", "1"),
        ("inferred_phase", "rad"),
        ("inferred_strain", "1"),
    ];
    let meta = provenance(
        "simulate",
        "formula: exact state-vector chain, noiseless readout".into(),
        None,
        &units,
        config,
    );
    let mut table = Table::new(&units.map(|u| u.0));
    table.push(vec![
        fmt_f64(r.strain_h),
        fmt_f64(r.theta),
        fmt_f64(r.success_probability),
        fmt_f64(r.gamma_exact),
        fmt_opt(r.gamma_approx),
        fmt_f64(r.relative_phase),
        fmt_f64(r.i1),
        fmt_f64(r.i2),
        fmt_f64(r.asymmetry),
        fmt_f64(r.inferred_phase),
        fmt_f64(r.inferred_strain),
    ]);
    emit(out, m, "simulate", &meta, &table, json!({ "result": r }));
    Ok(())
}

fn cmd_mc(m: &RunManifest, config: &ResolvedConfig, out: &mut OutputSet) -> Result<(), CliError> {
    let signal = config.run.signal()?;
    let n_trials = config.run.trials()?;
    let detector = &config.detector;
    let theta = phase_from_strain(&signal, detector);
    let outcome: PostSelectedOutcome = weak_measurement(theta, &detector.post_selection()?)?;
    let run = run_shot_noise_mc(&outcome, detector, m.seed, n_trials)?;

    let units = [
        ("trial_index", "1"),
        ("n_post_selected", "photons"),
        ("n_D1", "photons"),
        ("n_D2", "photons"),
        ("estimator", "1"),
        ("inferred_phase", "rad"),
        ("inferred_strain", "1"),
        ("clamped_flag", "bool"),
    ];
    let source = format!(
        "monte carlo: nested binomial photon counting, ChaCha8 stream per trial, {n_trials} trials"
    );
    let meta = provenance("mc", source, Some(m.seed), &units, config);
    let mut table = Table::new(&units.map(|u| u.0));
    for t in &run.trials {
        table.push(vec![
            t.trial_index.to_string(),
            t.counts.n_post_selected().to_string(),
            t.counts.n_d1.to_string(),
            t.counts.n_d2.to_string(),
            fmt_opt(t.estimator),
            fmt_opt(t.inferred_phase),
            fmt_opt(t.inferred_strain),
            u8::from(t.clamped).to_string(),
        ]);
    }
    if m.format.csv() {
        out.add("mc_trials.csv", render_csv(&meta, &table));
        let e = &run.ensemble;
        let summary_units = [
            ("n_photons_in", "photons/trial"),
            ("success_probability", "1"),
            ("prob_r", "1"),
            ("n_post_selected", "photons"),
            ("n_D1", "photons"),
            ("n_D2", "photons"),
            ("n_excluded", "trials"),
            ("n_clamped", "trials"),
            ("estimator_mean", "1"),
            ("estimator_stderr", "1"),
            ("estimator_std", "1"),
            ("phase_mean", "rad"),
            ("phase_std", "rad"),
            ("strain_mean", "1"),
            ("strain_std", "1"),
        ];
        let mut summary = Table::new(&summary_units.map(|u| u.0));
        summary.push(vec![
            e.n_photons_in.to_string(),
            fmt_f64(e.success_probability),
            fmt_f64(e.prob_r),
            e.n_post_selected.to_string(),
            e.n_d1.to_string(),
            e.n_d2.to_string(),
            e.n_excluded.to_string(),
            e.n_clamped.to_string(),
            fmt_f64(e.estimator_mean),
            fmt_f64(e.estimator_stderr),
            fmt_f64(e.estimator_std),
            fmt_f64(e.phase.mean),
            fmt_f64(e.phase.std),
            fmt_f64(e.strain.mean),
            fmt_f64(e.strain.std),
        ]);
        let summary_meta = provenance(
            "mc",
            meta.source.clone(),
            Some(m.seed),
            &summary_units,
            config,
        );
        out.add("mc_summary.csv", render_csv(&summary_meta, &summary));
    }
    if m.format.json() {
        out.add(
            "mc.json",
            render_json(
                &meta,
                json!({ "ensemble": run.ensemble, "trials": run.trials }),
            ),
        );
    }
    if m.plot {
        let est: Vec<f64> = run.trials.iter().filter_map(|t| t.estimator).collect();
        out.add_plot(
            "mc_histogram.svg",
            histogram(
                "Monte Carlo estimator (I1-I2)/(I1+I2)",
                "estimator",
                &est,
                40,
            ),
        );
    }
    Ok(())
}

fn sensitivity_units() -> [(&'static str, &'static str); 5] {
    [
        ("value", "axis unit"),
        ("h_min_formula", "1"),
        ("h_min_optimistic", "1"),
        ("h_min_mc", "1"),
        ("success_probability", "1"),
    ]
}

fn mc_budget(m: &RunManifest, config: &ResolvedConfig) -> Option<McBudget> {
    config.run.n_trials.map(|n_trials| McBudget {
        seed: m.seed,
        n_trials,
    })
}

fn sensitivity_source(mc: Option<McBudget>) -> String {
    let mut s = "formula: closed-form shot-noise h_min, post-selected (h_min_formula) and optimistic readings".to_owned();
    if let Some(b) = mc {
        s.push_str(&format!(
            "; h_min_mc: monte carlo SNR=1 bisection, {} trials per point",
            b.n_trials
        ));
    }
    s
}

fn cmd_sweep(
    m: &RunManifest,
    config: &ResolvedConfig,
    out: &mut OutputSet,
) -> Result<(), CliError> {
    let (axis, grid) = config.run.sweep()?;
    let mc = mc_budget(m, config);
    let report = sensitivity::sweep(&config.detector, axis, grid, mc)?;
    let units = sensitivity_units();
    let meta = provenance(
        "sweep",
        sensitivity_source(mc),
        mc.map(|b| b.seed),
        &units,
        config,
    );
    let mut table = Table::new(&units.map(|u| u.0));
    for p in &report.points {
        table.push(vec![
            fmt_f64(p.value),
            fmt_f64(p.h_min_formula),
            fmt_f64(p.h_min_optimistic),
            fmt_opt(p.h_min_mc),
            fmt_f64(p.success_probability),
        ]);
    }
    emit(
        out,
        m,
        "sweep",
        &meta,
        &table,
        serde_json::to_value(&report).expect("report serializes"),
    );
    if m.plot {
        let mut series = vec![
            Series {
                label: "h_min (post-selected)",
                points: report
                    .points
                    .iter()
                    .map(|p| (p.value, p.h_min_formula))
                    .collect(),
            },
            Series {
                label: "h_min (optimistic)",
                points: report
                    .points
                    .iter()
                    .map(|p| (p.value, p.h_min_optimistic))
                    .collect(),
            },
        ];
        if mc.is_some() {
            series.push(Series {
                label: "h_min (monte carlo)",
                points: report
                    .points
                    .iter()
                    .filter_map(|p| Some((p.value, p.h_min_mc?)))
                    .collect(),
            });
        }
        out.add_plot(
            "sweep.svg",
            line_chart(
                "Minimum detectable strain",
                axis,
                "h_min",
                &series,
                Scale::Log,
                Scale::Log,
            ),
        );
    }
    Ok(())
}

fn cmd_sensitivity(
    m: &RunManifest,
    config: &ResolvedConfig,
    out: &mut OutputSet,
) -> Result<(), CliError> {
    let mc = mc_budget(m, config);
    let report = sensitivity::report(&config.detector, mc)?;
    let f = report.h_min_formula;
    let g = gains(&config.detector);
    let units = [
        ("h_min_formula", "1"),
        ("h_min_second_form", "1"),
        ("h_min_optimistic", "1"),
        ("h_min_mc", "1"),
        ("amplification", "1"),
        ("success_probability", "1"),
        ("detected_power", "W"),
        ("gain_power_recycling", "1"),
        ("gain_arm", "1"),
    ];
    let meta = provenance(
        "sensitivity",
        sensitivity_source(mc),
        mc.map(|b| b.seed),
        &units,
        config,
    );
    let mut table = Table::new(&units.map(|u| u.0));
    table.push(vec![
        fmt_f64(f.h_min),
        fmt_f64(f.h_min_second_form),
        fmt_f64(f.h_min_optimistic),
        fmt_opt(report.h_min_mc.map(|e| e.h_min)),
        fmt_f64(f.amplification),
        fmt_f64(f.success_probability),
        fmt_f64(f.detected_power),
        fmt_f64(g.power_recycling),
        fmt_f64(g.arm),
    ]);
    emit(
        out,
        m,
        "sensitivity",
        &meta,
        &table,
        serde_json::to_value(&report).expect("report serializes"),
    );
    Ok(())
}

fn cmd_compare_dc(
    m: &RunManifest,
    config: &ResolvedConfig,
    out: &mut OutputSet,
) -> Result<(), CliError> {
    let rows = compare_dc(&config.detector, &config.run.theta_grid())?;
    let units = [
        ("theta", "rad"),
        ("wva_asymmetry", "1"),
        ("wva_asymmetry_ideal", "1"),
        ("dc_intensity", "W"),
        ("dc_intensity_ideal", "W"),
        ("dc_offset", "W"),
        ("dc_relative_signal", "1"),
    ];
    let meta = provenance(
        "compare-dc",
        "formula: exact-chain R/L asymmetry vs. DC readout I_in[(k dl)^2 + 2 k dl theta] + I_d; ideal columns drop dl and I_d".into(),
        None,
        &units,
        config,
    );
    let mut table = Table::new(&units.map(|u| u.0));
    for r in &rows {
        table.push(vec![
            fmt_f64(r.theta),
            fmt_f64(r.wva_asymmetry),
            fmt_f64(r.wva_asymmetry_ideal),
            fmt_f64(r.dc_intensity),
            fmt_f64(r.dc_intensity_ideal),
            fmt_f64(r.dc_offset),
            fmt_f64(r.dc_relative_signal),
        ]);
    }
    emit(out, m, "compare_dc", &meta, &table, json!({ "rows": rows }));
    if m.plot {
        let series = [
            Series {
                label: "WVA asymmetry",
                points: rows.iter().map(|r| (r.theta, r.wva_asymmetry)).collect(),
            },
            Series {
                label: "DC relative signal",
                points: rows
                    .iter()
                    .map(|r| (r.theta, r.dc_relative_signal))
                    .collect(),
            },
        ];
        out.add_plot(
            "compare_dc.svg",
            line_chart(
                "WVA vs DC readout",
                "theta [rad]",
                "signal [1]",
                &series,
                Scale::Linear,
                Scale::Linear,
            ),
        );
    }
    Ok(())
}

/// Runs `m` and writes its outputs.
pub fn run(m: &RunManifest) -> Result<Vec<std::path::PathBuf>, CliError> {
    let config = crate::config::parse_config(&m.config_path, &m.overrides)?;
    let mut out = OutputSet::default();
    match m.command {
        Command::Simulate => cmd_simulate(m, &config, &mut out)?,
        Command::Mc => cmd_mc(m, &config, &mut out)?,
        Command::Sweep => cmd_sweep(m, &config, &mut out)?,
        Command::Sensitivity => cmd_sensitivity(m, &config, &mut out)?,
        Command::CompareDc => cmd_compare_dc(m, &config, &mut out)?,
    }
    out.write(&m.output_dir, m.force)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn simulate_null_signal() {
        let c = parse_config_str("strain_h = 0", &[]).unwrap();
        let r = simulate(&c).unwrap();
        assert_eq!(r.asymmetry, 0.0);
        assert_eq!(r.inferred_strain, 0.0);
    }

    #[test]
    fn simulate_round_trip_at_defaults() {
        let c = parse_config_str("strain_h = 1e-21", &[]).unwrap();
        let r = simulate(&c).unwrap();
        assert!((r.inferred_strain - 1e-21).abs() < 1e-27);
    }

    #[test]
    fn simulate_without_amplification_is_physics_error() {
        for h in ["0", "1e-21"] {
            let c =
                parse_config_str(&format!("strain_h = {h}\npost_select_delta = 0"), &[]).unwrap();
            assert_eq!(simulate(&c).unwrap_err().exit_code(), 3);
        }
        let c = parse_config_str("strain_h = 0\npost_select_delta = 0", &[]).unwrap();
        assert!(simulate(&c)
            .unwrap_err()
            .to_string()
            .contains("gamma undefined"));
    }

    #[test]
    fn dc_comparison_contrast() {
        let clean = DetectorConfig {
            dc_arm_asymmetry: 0.0,
            dc_leak_intensity: 0.0,
            ..Default::default()
        };
        let thetas = [-1e-10, 0.0, 1e-10];
        let rows = compare_dc(&clean, &thetas).unwrap();
        assert_eq!(rows[1].wva_asymmetry, 0.0);
        assert_eq!(rows[1].dc_intensity, 0.0);

        let leaky = DetectorConfig {
            dc_leak_intensity: 3e-4,
            ..Default::default()
        };
        let base = compare_dc(&DetectorConfig::default(), &thetas).unwrap();
        let with_leak = compare_dc(&leaky, &thetas).unwrap();
        for (a, b) in base.iter().zip(&with_leak) {
            assert!((b.dc_intensity - a.dc_intensity - 3e-4).abs() < 1e-15);
            assert_eq!(a.wva_asymmetry, b.wva_asymmetry);
        }
    }

    #[test]
    fn dc_comparison_small_signal_values() {
        let c = DetectorConfig::default();
        let rows = compare_dc(&c, &[1e-10]).unwrap();
        let a = c.post_selection().unwrap().amplification().unwrap();
        // |sin Δ| ≈ 2(2A+1)θ ≈ 4Aθ
        assert!((rows[0].wva_asymmetry.abs() / (4.0 * a * 1e-10) - 1.0).abs() < 0.01);
        let k_dl = c.wavenumber() * c.dc_arm_asymmetry;
        assert!((rows[0].dc_relative_signal / (2e-10 / k_dl) - 1.0).abs() < 1e-9);
    }
}
