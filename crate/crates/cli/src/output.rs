//! Result files.
//!
//! CSV: comma separated, `.` decimal point, LF line endings, one header row,
//! floats in scientific notation with 17 significant digits. A block of `#`
//! lines before the header carries the version, command, provenance, units
//! and the fully resolved configuration. JSON files carry the same metadata
//! as top-level fields.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::ResolvedConfig;
use crate::error::CliError;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "NaN".to_owned())
}

/// What every output file says about itself.
#[derive(Debug, Clone)]
pub struct Provenance<'a> {
    pub command: &'static str,
    pub source: String,
    pub seed: Option<u64>,
    pub units: Vec<(&'static str, &'static str)>,
    pub config: &'a ResolvedConfig,
}

impl Provenance<'_> {
    fn comment_block(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# wvagw {}", wvagw::VERSION);
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# provenance: {}", self.source);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed: {seed}");
        }
        let units: Vec<String> = self
            .units
            .iter()
            .map(|(c, u)| format!("{c} [{u}]"))
            .collect();
        let _ = writeln!(s, "# units: {}", units.join(", "));
        for (k, v) in self.config.describe() {
            let _ = writeln!(s, "# config: {k} = {v}");
        }
        s
    }

    fn json_header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("version".into(), wvagw::VERSION.into());
        m.insert("command".into(), self.command.into());
        m.insert("provenance".into(), self.source.clone().into());
        if let Some(seed) = self.seed {
            m.insert("seed".into(), seed.into());
        }
        let units: Map<String, Value> = self
            .units
            .iter()
            .map(|(c, u)| ((*c).to_owned(), Value::from(*u)))
            .collect();
        m.insert("units".into(), Value::Object(units));
        m.insert(
            "config".into(),
            serde_json::to_value(self.config).expect("config serializes"),
        );
        m
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn render_csv(meta: &Provenance, table: &Table) -> String {
    let mut s = meta.comment_block();
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// `body`'s fields are merged after the metadata fields.
pub fn render_json(meta: &Provenance, body: Value) -> String {
    let mut m = meta.json_header();
    match body {
        Value::Object(fields) => m.extend(fields),
        other => {
            m.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json renders");
    s.push('\n');
    s
}

/// Files to write; nothing is written unless every target is free (or
/// `force` is set).
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
    plots: Vec<(String, Result<String, String>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn add_plot(&mut self, name: impl Into<String>, svg: Result<String, String>) {
        self.plots.push((name.into(), svg));
    }

    pub fn write(self, dir: &Path, force: bool) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let targets = self
            .files
            .iter()
            .map(|(n, _)| n)
            .chain(self.plots.iter().map(|(n, _)| n));
        if !force {
            for name in targets {
                let p = dir.join(name);
                if p.exists() {
                    return Err(CliError::WouldOverwrite(p));
                }
            }
        }
        let mut written = Vec::new();
        for (name, contents) in self.files {
            let p = dir.join(name);
            std::fs::write(&p, contents).map_err(|e| CliError::io(&p, e))?;
            written.push(p);
        }
        // plots never fail the run
        for (name, svg) in self.plots {
            let p = dir.join(name);
            match svg
                .map_err(|e| e.to_string())
                .and_then(|s| std::fs::write(&p, s).map_err(|e| e.to_string()))
            {
                Ok(()) => written.push(p),
                Err(e) => eprintln!("warning: plot {} skipped: {e}", p.display()),
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1e-21), "9.9999999999999991e-22");
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-4000.0), "-4.0000000000000000e3");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
