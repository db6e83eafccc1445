//! Report types and writers.
//!
//! Everything that varies between identical runs (start time, wall-clock
//! durations) lives in [`Timing`] so the rest of the document is
//! byte-for-byte reproducible.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// One convergence or sweep table, written as CSV `parameter,value,residual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub parameter: String,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub parameter: f64,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Reported quantities without a pass/fail judgement.
    pub notes: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix: f64,
    pub total_seconds: f64,
    /// `suite -> check -> seconds`.
    pub checks: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub schema_version: u32,
    pub version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub timing: Timing,
}

impl FullReport {
    pub fn new(config: RunConfig, suites: Vec<(SuiteReport, BTreeMap<String, f64>)>, started: SystemTime, elapsed: Duration) -> Self {
        let mut timing = Timing {
            started_unix: started.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            total_seconds: elapsed.as_secs_f64(),
            checks: BTreeMap::new(),
        };
        let mut out = Vec::with_capacity(suites.len());
        for (suite, times) in suites {
            timing.checks.insert(suite.suite.clone(), times);
            out.push(suite);
        }
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            passed: out.iter().all(|s| s.passed),
            suites: out,
            timing,
        }
    }

    /// Writes the JSON report and/or one CSV per table into `dir`; returns
    /// the paths written.
    pub fn write(&self, dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if matches!(format, Format::Json | Format::Both) {
            let path = dir.join("report.json");
            let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
            fs::write(&path, text + "\n")?;
            written.push(path);
        }
        if matches!(format, Format::Csv | Format::Both) {
            for suite in &self.suites {
                for table in &suite.tables {
                    let path = dir.join(format!("{}_{}.csv", suite.suite, table.name));
                    write_table(&path, table)?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

fn write_table(path: &Path, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["parameter", "value", "residual"])?;
    for row in &table.rows {
        w.serialize((row.parameter, row.value, row.residual))?;
    }
    w.flush()
}

/// Accumulates checks for one suite and times each of them.
pub struct SuiteBuilder {
    report: SuiteReport,
    times: BTreeMap<String, f64>,
}

impl SuiteBuilder {
    pub fn new(name: &str) -> Self {
        Self {
            report: SuiteReport {
                suite: name.to_string(),
                passed: true,
                checks: Vec::new(),
                notes: BTreeMap::new(),
                tables: Vec::new(),
            },
            times: BTreeMap::new(),
        }
    }

    /// Runs `f`, which yields a residual, and records `residual < tolerance`.
    /// An error fails the check and is kept as its message.
    pub fn check<E: std::fmt::Display>(&mut self, name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64, E>) {
        let start = Instant::now();
        let outcome = f();
        self.times.insert(name.to_string(), start.elapsed().as_secs_f64());
        let record = match outcome {
            Ok(residual) => CheckRecord {
                name: name.to_string(),
                residual,
                tolerance,
                passed: residual < tolerance,
                error: None,
            },
            Err(e) => CheckRecord {
                name: name.to_string(),
                residual: f64::NAN,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        };
        self.push(record);
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.report.passed &= record.passed;
        self.report.checks.push(record);
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.report.notes.insert(key.to_string(), v);
    }

    pub fn table(&mut self, name: &str, parameter: &str, rows: Vec<TableRow>) {
        self.report.tables.push(Table {
            name: name.to_string(),
            parameter: parameter.to_string(),
            rows,
        });
    }

    pub fn finish(self) -> (SuiteReport, BTreeMap<String, f64>) {
        (self.report, self.times)
    }
}
