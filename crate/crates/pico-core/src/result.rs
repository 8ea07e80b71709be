//! Benchmark run records and the persisted result shape.
//!
//! Field declaration order here is the canonical key order of the JSON
//! schema; the report module relies on it.

use serde::{Deserialize, Serialize};

use crate::config::BenchmarkConfig;
use crate::stats::MetricSummary;

pub const SCHEMA_VERSION: u32 = 1;

/// Best-effort description of the machine a run executed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformInfo {
    /// Operator-chosen name, e.g. "rpi4" or "bbai64".
    pub label: String,
    pub os: String,
    pub cpu_model: String,
    pub cores: u64,
    pub total_memory_kb: u64,
}

impl PlatformInfo {
    pub fn unknown(label: &str) -> Self {
        Self {
            label: label.to_string(),
            os: "unknown".into(),
            cpu_model: "unknown".into(),
            cores: 1,
            total_memory_kb: 0,
        }
    }
}

/// One measured inference iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub index: u64,
    pub sample_id: String,
    pub latency_ms: f64,
    /// Absent when the iteration was shorter than the CPU counter
    /// resolution (no tick advanced).
    pub cpu_pct: Option<f64>,
    pub mem_pct_before: f64,
    pub mem_pct_after: f64,
    pub predicted_label: String,
    pub confidence: f64,
}

/// Per-metric summaries over a run. `cpu_pct` summarizes only iterations
/// where a value was measured and is null when none were; `mem_pct`
/// summarizes the post-inference reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummaries {
    pub latency_ms: MetricSummary,
    pub cpu_pct: Option<MetricSummary>,
    pub mem_pct: MetricSummary,
    pub confidence: MetricSummary,
}

/// Complete output of one benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub model_id: String,
    pub platform: PlatformInfo,
    pub config: BenchmarkConfig,
    pub started_at_unix_ms: u64,
    /// CPU utilization over one window spanning the whole measured phase;
    /// null if no tick advanced.
    pub cpu_pct_run: Option<f64>,
    pub records: Vec<IterationRecord>,
    pub summaries: RunSummaries,
}

/// What gets flushed when a run aborts mid-way: everything measured so
/// far plus the error, no summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialRunResult {
    pub schema_version: u32,
    pub model_id: String,
    pub platform: PlatformInfo,
    pub config: BenchmarkConfig,
    pub started_at_unix_ms: u64,
    pub error: String,
    pub records: Vec<IterationRecord>,
}
