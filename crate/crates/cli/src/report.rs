//! Verification reports: a TOML document and a csv summary.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const REPORT_FILE: &str = "report.toml";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub violation: f64,
    pub tol: f64,
    pub pass: bool,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    /// Seconds since the Unix epoch.
    pub generated: u64,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            generated: std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec_sha256: String,
    pub seed: u64,
    pub pass: bool,
    pub environment: Environment,
    #[serde(default)]
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(spec_sha256: String, seed: u64) -> Self {
        Self { spec_sha256, seed, pass: true, environment: Environment::current(), checks: vec![] }
    }

    pub fn push(&mut self, r: CheckRecord) {
        debug_assert!(self.checks.iter().all(|c| c.id != r.id), "duplicate check {}", r.id);
        self.pass &= r.pass;
        self.checks.push(r);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let r: Self = toml::from_str(text).map_err(|e| CliError::Schema { line: None, field: "report".into(), message: e.message().into() })?;
        let mut ids: Vec<&str> = r.checks.iter().map(|c| c.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Schema { line: None, field: "checks.id".into(), message: format!("duplicate check {}", w[0]) });
        }
        if r.pass != r.checks.iter().all(|c| c.pass) {
            return Err(CliError::Schema { line: None, field: "pass".into(), message: "overall verdict disagrees with the records".into() });
        }
        Ok(r)
    }

    /// One row per check; no timing or environment columns.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "anchor", "violation", "tol", "pass"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([c.id.as_str(), c.anchor.as_str(), &format!("{:e}", c.violation), &format!("{:e}", c.tol), if c.pass { "true" } else { "false" }])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Writes `report.toml` and `summary.csv` into `dir`.
pub fn emit_report(report: &VerificationReport, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let (t, c) = (dir.join(REPORT_FILE), dir.join(SUMMARY_FILE));
    std::fs::write(&t, report.to_toml()).map_err(|e| io(&t, e))?;
    std::fs::write(&c, report.to_csv()).map_err(|e| io(&c, e))?;
    Ok((t, c))
}

pub fn read_report(dir: &Path) -> Result<VerificationReport, CliError> {
    let p = dir.join(REPORT_FILE);
    let text = std::fs::read_to_string(&p).map_err(|e| io(&p, e))?;
    VerificationReport::from_toml(&text)
}
