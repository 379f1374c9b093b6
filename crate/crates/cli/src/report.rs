//! JSON summaries and CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use skewdiff_core::coupling::{BoundCheck, TargetCheck};
use skewdiff_core::McSummary;

/// One gate inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Acceptance threshold or allowance, when the gate has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, estimate: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            estimate,
            stderr: None,
            target: None,
            bound: None,
            tolerance: None,
            pass,
        }
    }

    pub fn stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    pub fn target(mut self, t: f64) -> Self {
        self.target = Some(t);
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn tolerance(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    pub fn from_summary(name: &str, s: &McSummary, pass: bool) -> Self {
        Self::new(name, s.mean, pass).stderr(s.std_err)
    }

    pub fn from_target(name: &str, c: &TargetCheck) -> Self {
        Self::from_summary(name, &c.summary, c.pass)
            .target(c.target)
            .tolerance(c.allowance)
    }

    pub fn from_bound(name: &str, c: &BoundCheck) -> Self {
        Self::from_summary(name, &c.summary, c.pass).bound(c.bound)
    }
}

/// Machine-readable result of one experiment. The headline fields mirror the
/// first check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    pub estimate: f64,
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl Report {
    /// Builds a report from a nonempty list of checks.
    pub fn new(experiment: &str, parameters: BTreeMap<String, Value>, checks: Vec<Check>) -> Self {
        let head = checks
            .first()
            .cloned()
            .expect("a report needs at least one check");
        Self {
            experiment: experiment.to_string(),
            parameters,
            estimate: head.estimate,
            stderr: head.stderr,
            target: head.target,
            bound: head.bound,
            pass: checks.iter().all(|c| c.pass),
            checks,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail values serialize"),
        );
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Parameter map builder.
#[derive(Debug, Default)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, value: impl Serialize) -> Self {
        self.0.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    pub fn build(self) -> BTreeMap<String, Value> {
        self.0
    }
}

/// CSV with a fixed header; numbers use shortest round-trip formatting.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    body: String,
    rows: usize,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.header.len());
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            write!(self.body, "{v}").expect("writing to a String");
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        s.push_str(&self.body);
        s
    }
}
