//! Structured verification records and their CSV/JSON serialization.
//!
//! Every check run by the CLI produces one [`VerificationRecord`]; a
//! [`VerificationReport`] collects them and serializes deterministically:
//! stable column order, parameter keys sorted alphabetically, floats in
//! shortest round-trip decimal form.  Identical inputs therefore produce
//! byte-identical output, so reports can be diffed across runs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::qcore::{QError, QResult};

/// Outcome of a single verification check.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerificationRecord {
    /// Unique identifier of the individual check instance.
    pub check_id: String,
    /// Which identity or property the check exercises (e.g.
    /// "aw-transform-roundtrip").
    pub formula: String,
    /// Numeric inputs of the check, keyed by name.
    pub parameters: BTreeMap<String, f64>,
    /// The measured quantity (typically a maximal relative error).
    pub metric: f64,
    /// The acceptance threshold for the metric.
    pub threshold: f64,
    /// Always equal to `metric <= threshold`.
    pub pass: bool,
    pub runtime_ms: u64,
}

impl VerificationRecord {
    /// Build a record; `pass` is derived from metric and threshold.
    pub fn new(
        check_id: impl Into<String>,
        formula: impl Into<String>,
        parameters: BTreeMap<String, f64>,
        metric: f64,
        threshold: f64,
        runtime_ms: u64,
    ) -> Self {
        VerificationRecord {
            check_id: check_id.into(),
            formula: formula.into(),
            parameters,
            metric,
            threshold,
            pass: metric <= threshold,
            runtime_ms,
        }
    }
}

/// An ordered collection of verification records.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerificationReport {
    pub records: Vec<VerificationRecord>,
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Quote a CSV field when it contains a delimiter, quote or newline.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport::default()
    }

    pub fn push(&mut self, record: VerificationRecord) {
        self.records.push(record);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// CSV with fixed leading columns (check_id, formula, metric, threshold,
    /// pass, runtime_ms) followed by the union of all parameter keys in
    /// alphabetical order; a record without a given key leaves the cell
    /// empty.  An empty report yields only the header line.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<&str> = Vec::new();
        for r in &self.records {
            for k in r.parameters.keys() {
                if !keys.contains(&k.as_str()) {
                    keys.push(k);
                }
            }
        }
        keys.sort_unstable();
        let mut out = String::from("check_id,formula,metric,threshold,pass,runtime_ms");
        for k in &keys {
            out.push(',');
            out.push_str(&csv_field(k));
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                csv_field(&r.check_id),
                csv_field(&r.formula),
                r.metric,
                r.threshold,
                r.pass,
                r.runtime_ms
            ));
            for k in &keys {
                out.push(',');
                if let Some(v) = r.parameters.get(*k) {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// A single JSON object `{"records": [...]}`, pretty-printed with
    /// parameter maps in key order.
    pub fn to_json(&self) -> String {
        // BTreeMap keys and Vec order make this deterministic.
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(s: &str) -> QResult<Self> {
        serde_json::from_str(s)
            .map_err(|e| QError::InvalidParams(format!("malformed report JSON: {e}")))
    }

    /// Serialize in the requested format to a file, or to standard output
    /// when no destination is given.
    pub fn emit(&self, format: ReportFormat, destination: Option<&Path>) -> QResult<()> {
        let body = match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => {
                let mut s = self.to_json();
                s.push('\n');
                s
            }
        };
        match destination {
            Some(path) => std::fs::write(path, body).map_err(|source| QError::Io {
                path: path.display().to_string(),
                source,
            }),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(body.as_bytes())
                    .map_err(|source| QError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}
