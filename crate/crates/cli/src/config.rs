//! Flat `key = value` configuration files.
//!
//! Keys are the [`DetectorConfig`] field names plus a handful of run
//! parameters. Lines starting with `#` are comments; a trailing `# ...` after
//! a value is also stripped. Detector keys that are absent keep their
//! LIGO-like defaults.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use wvagw::optics::{DetectorConfig, GwSignal};

use crate::error::CliError;

pub const RUN_KEYS: [&str; 5] = [
    "strain_h",
    "n_trials",
    "sweep_axis",
    "sweep_grid",
    "theta_grid",
];

/// Per-run parameters that are not part of the detector.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strain_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
}

fn missing(key: &str, what: &str) -> CliError {
    CliError::Config(format!("missing required key `{key}` ({what})"))
}

impl RunParams {
    pub fn signal(&self) -> Result<GwSignal, CliError> {
        let h = self
            .strain_h
            .ok_or_else(|| missing("strain_h", "dimensionless strain, |h| < 1e-3"))?;
        Ok(GwSignal::new(h)?)
    }

    pub fn trials(&self) -> Result<usize, CliError> {
        self.n_trials
            .ok_or_else(|| missing("n_trials", "integer >= 1"))
    }

    pub fn sweep(&self) -> Result<(&str, &[f64]), CliError> {
        let axis = self
            .sweep_axis
            .as_deref()
            .ok_or_else(|| missing("sweep_axis", "a detector key"))?;
        let grid = self.sweep_grid.as_deref().ok_or_else(|| {
            missing(
                "sweep_grid",
                "comma list, linspace(a, b, n) or logspace(a, b, n)",
            )
        })?;
        Ok((axis, grid))
    }

    /// `linspace(-1e-9, 1e-9, 21)` unless configured.
    pub fn theta_grid(&self) -> Vec<f64> {
        self.theta_grid
            .clone()
            .unwrap_or_else(|| linspace(-1e-9, 1e-9, 21))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub detector: DetectorConfig,
    pub run: RunParams,
}

impl ResolvedConfig {
    /// `key = value` lines of every resolved key, detector keys first.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = DetectorConfig::key_names()
            .map(|k| {
                (
                    k.to_owned(),
                    crate::output::fmt_f64(self.detector.get(k).unwrap()),
                )
            })
            .collect();
        let r = &self.run;
        if let Some(h) = r.strain_h {
            out.push(("strain_h".into(), crate::output::fmt_f64(h)));
        }
        if let Some(n) = r.n_trials {
            out.push(("n_trials".into(), n.to_string()));
        }
        if let Some(a) = &r.sweep_axis {
            out.push(("sweep_axis".into(), a.clone()));
        }
        let grid = |g: &[f64]| {
            let mut s = String::new();
            for (i, x) in g.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{}", crate::output::fmt_f64(*x));
            }
            s
        };
        if let Some(g) = &r.sweep_grid {
            out.push(("sweep_grid".into(), grid(g)));
        }
        if let Some(g) = &r.theta_grid {
            out.push(("theta_grid".into(), grid(g)));
        }
        out
    }
}

/// Evenly spaced, both ends included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let m = (n - 1) as f64;
            (0..n)
                .map(|i| a * ((n - 1 - i) as f64 / m) + b * (i as f64 / m))
                .collect()
        }
    }
}

/// Log-evenly spaced, both ends included.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(a.log10(), b.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect();
    // ends pinned to the exact inputs
    if let Some(first) = v.first_mut() {
        *first = a;
    }
    if n > 1 {
        if let Some(last) = v.last_mut() {
            *last = b;
        }
    }
    v
}

fn parse_number(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: `{value}` is not a finite number")))
}

fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let value = value.trim();
    for (name, f) in [
        ("linspace", linspace as fn(f64, f64, usize) -> Vec<f64>),
        ("logspace", logspace),
    ] {
        if let Some(args) = value.strip_prefix(name) {
            let inner = args
                .trim()
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| {
                    CliError::Config(format!("{key}: expected {name}(start, stop, n)"))
                })?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::Config(format!(
                    "{key}: expected {name}(start, stop, n)"
                )));
            }
            let a = parse_number(key, parts[0])?;
            let b = parse_number(key, parts[1])?;
            let n: usize = parts[2].trim().parse().map_err(|_| {
                CliError::Config(format!("{key}: `{}` is not a point count", parts[2].trim()))
            })?;
            if name == "logspace" && !(a > 0.0 && b > 0.0) {
                return Err(CliError::Config(format!(
                    "{key}: logspace bounds must be positive"
                )));
            }
            return Ok(f(a, b, n));
        }
    }
    value.split(',').map(|v| parse_number(key, v)).collect()
}

fn valid_keys() -> String {
    DetectorConfig::key_names()
        .chain(RUN_KEYS)
        .collect::<Vec<_>>()
        .join(", ")
}

fn apply(resolved: &mut ResolvedConfig, key: &str, value: &str) -> Result<(), CliError> {
    let run = &mut resolved.run;
    match key {
        "strain_h" => run.strain_h = Some(parse_number(key, value)?),
        "n_trials" => {
            let n = value
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    CliError::Config(format!("n_trials must be an integer >= 1 (got `{value}`)"))
                })?;
            run.n_trials = Some(n);
        }
        "sweep_axis" => run.sweep_axis = Some(value.trim().to_owned()),
        "sweep_grid" => run.sweep_grid = Some(parse_grid(key, value)?),
        "theta_grid" => run.theta_grid = Some(parse_grid(key, value)?),
        _ => {
            let x = parse_number(key, value)?;
            if !resolved.detector.set(key, x) {
                return Err(CliError::Config(format!(
                    "unknown key `{key}`; valid keys: {}",
                    valid_keys()
                )));
            }
        }
    }
    Ok(())
}

/// Parses configuration text, then applies `key=value` overrides.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<ResolvedConfig, CliError> {
    let mut resolved = ResolvedConfig {
        detector: DetectorConfig::default(),
        run: RunParams::default(),
    };
    let mut seen = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(CliError::Config(format!(
                "line {}: duplicate key `{key}`",
                n + 1
            )));
        }
        seen.push(key);
        apply(&mut resolved, key, value)?;
    }
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{o}`")))?;
        apply(&mut resolved, key.trim(), value)?;
    }
    resolved.detector.validate()?;
    if let Some(h) = resolved.run.strain_h {
        GwSignal::new(h)?;
    }
    Ok(resolved)
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ResolvedConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text, overrides)
}
