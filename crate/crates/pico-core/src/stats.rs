//! Metric summaries, prediction-stability analysis, and run comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::result::{IterationRecord, RunResult, RunSummaries};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty series")]
    EmptySeries,
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
}

/// Order statistics and moments of one metric series. Std uses the sample
/// (n-1) denominator and is 0 by convention for a single observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub count: u64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub p50: f64,
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
}

/// Percentile by linear interpolation at rank `p/100 * (n-1)` on sorted
/// values, clamped to the two bracketing order statistics so floating-point
/// overshoot can never reorder percentiles.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = p / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    let v = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    v.clamp(sorted[lo], sorted[hi])
}

/// Single-pass mean and squared-deviation accumulator (Welford). Keeps a
/// constant series at exactly zero variance, which a two-pass formula does
/// not guarantee in floating point.
fn mean_m2(values: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    (mean, m2)
}

/// Summarizes a non-empty series of finite values. The input is sorted
/// first and every statistic is computed from the sorted copy, making the
/// result invariant under permutation of the input.
pub fn summarize(values: &[f64]) -> Result<MetricSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySeries);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteValue { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);

    let n = sorted.len();
    let (mean, m2) = mean_m2(&sorted);
    let std = if n > 1 {
        (m2 / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(MetricSummary {
        count: n as u64,
        mean,
        std,
        min: sorted[0],
        max: sorted[n - 1],
        p50: percentile_sorted(&sorted, 50.0),
        p90: percentile_sorted(&sorted, 90.0),
        p95: percentile_sorted(&sorted, 95.0),
        p99: percentile_sorted(&sorted, 99.0),
    })
}

/// Builds the per-run summary block from iteration records: latency,
/// CPU (measured iterations only; None when no iteration had a reading),
/// post-inference memory, and confidence.
pub fn summarize_records(records: &[IterationRecord]) -> Result<RunSummaries, StatsError> {
    let latency: Vec<f64> = records.iter().map(|r| r.latency_ms).collect();
    let cpu: Vec<f64> = records.iter().filter_map(|r| r.cpu_pct).collect();
    let mem: Vec<f64> = records.iter().map(|r| r.mem_pct_after).collect();
    let confidence: Vec<f64> = records.iter().map(|r| r.confidence).collect();
    Ok(RunSummaries {
        latency_ms: summarize(&latency)?,
        cpu_pct: if cpu.is_empty() {
            None
        } else {
            Some(summarize(&cpu)?)
        },
        mem_pct: summarize(&mem)?,
        confidence: summarize(&confidence)?,
    })
}

/// Prediction-consistency view of a run: how spread out the confidences
/// are and how many distinct labels were predicted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub confidence_mean: f64,
    pub confidence_std: f64,
    pub label_histogram: BTreeMap<String, u64>,
    pub distinct_labels: u64,
}

pub fn stability(records: &[IterationRecord]) -> Result<StabilityReport, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptySeries);
    }
    let confidence: Vec<f64> = records.iter().map(|r| r.confidence).collect();
    let summary = summarize(&confidence)?;
    let mut label_histogram: BTreeMap<String, u64> = BTreeMap::new();
    for r in records {
        *label_histogram.entry(r.predicted_label.clone()).or_insert(0) += 1;
    }
    Ok(StabilityReport {
        confidence_mean: summary.mean,
        confidence_std: summary.std,
        distinct_labels: label_histogram.len() as u64,
        label_histogram,
    })
}

/// Which CPU number a comparison uses: the mean of per-iteration readings
/// (default) or the single whole-phase window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CpuAggregation {
    #[default]
    IterationMean,
    WholePhase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub model_id: String,
    pub platform_label: String,
    pub started_at_unix_ms: u64,
}

impl RunMeta {
    fn of(r: &RunResult) -> Self {
        Self {
            model_id: r.model_id.clone(),
            platform_label: r.platform.label.clone(),
            started_at_unix_ms: r.started_at_unix_ms,
        }
    }
}

/// One metric compared across two runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub metric: String,
    pub value_a: f64,
    pub value_b: f64,
    /// `value_a / value_b`; null when `value_b` is zero.
    pub ratio: Option<f64>,
    /// `value_a - value_b`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub run_a: RunMeta,
    pub run_b: RunMeta,
    pub metrics: Vec<ComparisonEntry>,
    /// Mismatched models or metrics present on only one side.
    pub warnings: Vec<String>,
}

fn cpu_value(r: &RunResult, agg: CpuAggregation) -> Option<f64> {
    match agg {
        CpuAggregation::IterationMean => r.summaries.cpu_pct.as_ref().map(|s| s.mean),
        CpuAggregation::WholePhase => r.cpu_pct_run,
    }
}

/// Compares two runs metric by metric on summary means. Metrics present in
/// only one run are skipped with a warning rather than failing the whole
/// comparison.
pub fn compare(a: &RunResult, b: &RunResult, cpu_agg: CpuAggregation) -> ComparisonReport {
    let mut warnings = Vec::new();
    if a.model_id != b.model_id {
        warnings.push(format!(
            "comparing different models: {:?} vs {:?}",
            a.model_id, b.model_id
        ));
    }

    let pairs: [(&str, Option<f64>, Option<f64>); 4] = [
        (
            "latency_ms",
            Some(a.summaries.latency_ms.mean),
            Some(b.summaries.latency_ms.mean),
        ),
        ("cpu_pct", cpu_value(a, cpu_agg), cpu_value(b, cpu_agg)),
        (
            "mem_pct",
            Some(a.summaries.mem_pct.mean),
            Some(b.summaries.mem_pct.mean),
        ),
        (
            "confidence",
            Some(a.summaries.confidence.mean),
            Some(b.summaries.confidence.mean),
        ),
    ];

    let mut metrics = Vec::new();
    for (name, va, vb) in pairs {
        match (va, vb) {
            (Some(value_a), Some(value_b)) => metrics.push(ComparisonEntry {
                metric: name.to_string(),
                value_a,
                value_b,
                ratio: if value_b != 0.0 {
                    Some(value_a / value_b)
                } else {
                    None
                },
                delta: value_a - value_b,
            }),
            (None, None) => {}
            (some_a, _) => warnings.push(format!(
                "metric {name} present only in run {}; skipped",
                if some_a.is_some() { "A" } else { "B" }
            )),
        }
    }

    ComparisonReport {
        run_a: RunMeta::of(a),
        run_b: RunMeta::of(b),
        metrics,
        warnings,
    }
}
