//! Self-describing experiment reports: every statistic carries its sample
//! size, seed range and (when gated) threshold.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Closeness in the limit theorems is stated in the Lévy–Prokhorov metric;
/// the reported distances are surrogates.
pub const METRIC_NOTE: &str = "Distances are Kolmogorov-Smirnov and 1-Wasserstein surrogates for the Levy-Prokhorov metric: they bound or approximate it but are not identical.";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Threshold {
    Below { value: f64 },
    AtLeast { value: f64 },
    Within { lo: f64, hi: f64 },
}

impl Threshold {
    pub fn check(&self, x: f64) -> bool {
        match *self {
            Threshold::Below { value } => x < value,
            Threshold::AtLeast { value } => x >= value,
            Threshold::Within { lo, hi } => x >= lo && x <= hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Threshold>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    pub sample_size: usize,
    pub seed: u64,
    /// Half-open stream range `[first, last)` that produced the statistic.
    pub streams: (u64, u64),
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Metric {
    pub fn info(name: impl Into<String>, value: f64, sample_size: usize, seed: u64, streams: (u64, u64)) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: None,
            passed: None,
            sample_size,
            seed,
            streams,
            note: String::new(),
        }
    }

    pub fn gated(mut self, threshold: Threshold) -> Self {
        self.passed = Some(threshold.check(self.value));
        self.threshold = Some(threshold);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// A named file written next to `report.json`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub code_version: String,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub metrics: Vec<Metric>,
    /// Structured detail (distance tables, sub-reports).
    pub details: serde_json::Value,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, metrics: Vec<Metric>, details: serde_json::Value, notes: Vec<String>) -> Self {
        let passed = metrics.iter().all(|m| m.passed != Some(false));
        Self {
            experiment: config.experiment.name().to_string(),
            code_version: CODE_VERSION.to_string(),
            config_sha256: config_hash(config),
            config: config.clone(),
            metrics,
            details,
            notes,
            passed,
        }
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    Sha256::digest(config.canonical_json().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// CSV from a header and rows of numbers.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
