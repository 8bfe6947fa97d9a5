use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::CliError;

pub const REPORT_VERSION: &str = "1.0";

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form used in CSV output: 12 significant digits, shortest representation.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e12) {
        format!("{r:e}")
    } else if x.is_finite() {
        format!("{r}")
    } else {
        x.to_string()
    }
}

fn ser_sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round_sig(*x))
    } else {
        s.serialize_none()
    }
}

fn ser_opt_sig<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_sig(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser_sig")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_sig")]
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// A NaN residual never passes.
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), max_residual, tolerance, passed: max_residual <= tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Reported {
    Number(#[serde(serialize_with = "ser_sig")] f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub fixture: String,
    pub samples: usize,
    #[serde(serialize_with = "ser_opt_sig")]
    pub tolerance_override: Option<f64>,
    pub checks: Vec<Check>,
    pub reported: BTreeMap<String, Reported>,
    pub passed: bool,
    pub wall_time_ms: u64,
}

impl SuiteResult {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.reported.get(key) {
            Some(Reported::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.reported.get(key) {
            Some(Reported::Text(v)) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn new(seed: u64, suites: Vec<SuiteResult>) -> Self {
        Self { version: REPORT_VERSION, seed, suites }
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,fixture,check,max_residual,tolerance,passed\n");
        for s in &self.suites {
            for c in &s.checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.suite,
                    s.fixture,
                    csv_field(&c.name),
                    fmt_sig(c.max_residual),
                    fmt_sig(c.tolerance),
                    c.passed
                );
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, format: Format, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.render(format))
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
