//! Result persistence (JSON, CSV) and chart rendering.

pub mod chart;

pub use chart::{render_chart, render_chart_svg, ChartKind, ChartSpec};

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::result::{PartialRunResult, RunResult, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("result file has schema version {found}, this build reads version {expected}")]
    SchemaVersionMismatch { found: u64, expected: u64 },
    #[error("malformed result file at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("run has no {0} readings")]
    MissingMetric(String),
    #[error("invalid chart spec: {0}")]
    InvalidChart(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Serializes a run result to pretty-printed JSON. Key order follows the
/// struct declarations, so output is stable across runs and versions.
pub fn result_to_json(result: &RunResult) -> String {
    let mut text = serde_json::to_string_pretty(result).expect("result serialization");
    text.push('\n');
    text
}

pub fn write_result_json(result: &RunResult, path: &Path) -> Result<(), ReportError> {
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(result_to_json(result).as_bytes())
        .map_err(io_err(path))?;
    Ok(())
}

pub fn write_partial_json(partial: &PartialRunResult, path: &Path) -> Result<(), ReportError> {
    let mut text = serde_json::to_string_pretty(partial).expect("partial serialization");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Reads a result file back, checking the schema version before touching
/// any other field. Unknown keys are ignored so files written by newer
/// minor revisions still load.
pub fn read_result_json(path: &Path) -> Result<RunResult, ReportError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_result_json(&text)
}

pub fn parse_result_json(text: &str) -> Result<RunResult, ReportError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ReportError::Parse {
            pointer: format!("line {}", e.line()),
            message: e.to_string(),
        })?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| ReportError::Parse {
            pointer: "schema_version".into(),
            message: "missing or non-integer".into(),
        })?;
    if found != SCHEMA_VERSION as u64 {
        return Err(ReportError::SchemaVersionMismatch {
            found,
            expected: SCHEMA_VERSION as u64,
        });
    }
    serde_path_to_error::deserialize(value).map_err(|e| ReportError::Parse {
        pointer: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub const CSV_HEADER: &str =
    "index,sample_id,latency_ms,cpu_pct,mem_pct_before,mem_pct_after,predicted_label,confidence";

/// Quotes a CSV field only when it needs it (comma, quote, or newline).
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per iteration record. Floats print in shortest round-trip
/// form; an absent CPU reading is an empty field, not a zero.
pub fn result_to_csv(result: &RunResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.records {
        let cpu = r.cpu_pct.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            csv_field(&r.sample_id),
            r.latency_ms,
            cpu,
            r.mem_pct_before,
            r.mem_pct_after,
            csv_field(&r.predicted_label),
            r.confidence,
        ));
    }
    out
}

pub fn write_result_csv(result: &RunResult, path: &Path) -> Result<(), ReportError> {
    fs::write(path, result_to_csv(result)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::BackendSpec;
    use crate::config::BenchmarkConfig;
    use crate::result::{IterationRecord, PlatformInfo, RunSummaries};
    use crate::stats;

    fn record(index: u64, latency_ms: f64, cpu: Option<f64>) -> IterationRecord {
        IterationRecord {
            index,
            sample_id: format!("s{}", index % 3),
            latency_ms,
            cpu_pct: cpu,
            mem_pct_before: 41.5,
            mem_pct_after: 41.6,
            predicted_label: "class_1".into(),
            confidence: 0.75 + index as f64 * 0.01,
        }
    }

    fn sample_result(cpu: bool) -> RunResult {
        let records: Vec<IterationRecord> = (0..6)
            .map(|i| record(i, 2.0 + i as f64 * 0.25, cpu.then_some(30.0 + i as f64)))
            .collect();
        let summaries = stats::summarize_records(&records).unwrap();
        RunResult {
            schema_version: crate::result::SCHEMA_VERSION,
            model_id: "kws-v2".into(),
            platform: PlatformInfo {
                label: "rig-a".into(),
                os: "linux".into(),
                cpu_model: "Fixture CPU".into(),
                cores: 4,
                total_memory_kb: 1024000,
            },
            config: BenchmarkConfig::new(
                "kws-v2",
                BackendSpec::Synthetic {
                    n_classes: 4,
                    input_len: 16,
                    busy_ms: 0,
                    seed: None,
                },
                "manifest.json",
            ),
            started_at_unix_ms: 1700000000000,
            cpu_pct_run: cpu.then_some(33.3),
            records,
            summaries,
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let result = sample_result(true);
        let parsed = parse_result_json(&result_to_json(&result)).unwrap();
        assert_eq!(parsed, result);
        // absent CPU serializes as null and comes back as None
        let no_cpu = sample_result(false);
        let parsed = parse_result_json(&result_to_json(&no_cpu)).unwrap();
        assert_eq!(parsed, no_cpu);
    }

    #[test]
    fn json_key_order_is_stable() {
        let text = result_to_json(&sample_result(true));
        let top_keys = [
            "\"schema_version\"",
            "\"model_id\"",
            "\"platform\"",
            "\"config\"",
            "\"started_at_unix_ms\"",
            "\"cpu_pct_run\"",
            "\"records\"",
            "\"summaries\"",
        ];
        let mut pos = 0;
        for key in top_keys {
            let at = text[pos..].find(key).unwrap_or_else(|| panic!("{key} missing or out of order"));
            pos += at;
        }
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn missing_cpu_serializes_as_null() {
        let text = result_to_json(&sample_result(false));
        assert!(text.contains("\"cpu_pct_run\": null"));
        assert!(text.contains("\"cpu_pct\": null"));
    }

    #[test]
    fn unknown_extra_keys_are_ignored() {
        let mut value: serde_json::Value =
            serde_json::from_str(&result_to_json(&sample_result(true))).unwrap();
        value["future_field"] = serde_json::json!({"x": 1});
        value["records"][0]["annotation"] = serde_json::json!("spurious");
        let parsed = parse_result_json(&value.to_string()).unwrap();
        assert_eq!(parsed, sample_result(true));
    }

    #[test]
    fn wrong_schema_version_is_rejected_before_parsing() {
        let mut value: serde_json::Value =
            serde_json::from_str(&result_to_json(&sample_result(true))).unwrap();
        value["schema_version"] = serde_json::json!(2);
        // poison another field: version check must fire first
        value["records"] = serde_json::json!("not an array");
        match parse_result_json(&value.to_string()) {
            Err(ReportError::SchemaVersionMismatch { found: 2, expected: 1 }) => {}
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn truncated_or_mistyped_files_name_the_field() {
        match parse_result_json("{\"schema_version\": 1, \"model_id\": 42") {
            Err(ReportError::Parse { .. }) => {}
            other => panic!("wrong result: {other:?}"),
        }
        let mut value: serde_json::Value =
            serde_json::from_str(&result_to_json(&sample_result(true))).unwrap();
        value["records"][2]["latency_ms"] = serde_json::json!("fast");
        match parse_result_json(&value.to_string()) {
            Err(ReportError::Parse { pointer, .. }) => {
                assert!(pointer.contains("records[2].latency_ms"), "{pointer}");
            }
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn csv_has_exact_header_and_one_line_per_record() {
        let result = sample_result(true);
        let csv = result_to_csv(&result);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + result.records.len());
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "s0");
        assert_eq!(first[2], "2");
        assert_eq!(first[3], "30");
        assert_eq!(first[6], "class_1");
    }

    #[test]
    fn csv_leaves_missing_cpu_empty() {
        let csv = result_to_csv(&sample_result(false));
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[3], "");
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let mut result = sample_result(true);
        result.records[0].predicted_label = "cat, tabby".into();
        result.records[1].predicted_label = "say \"hi\"".into();
        let csv = result_to_csv(&result);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].contains("\"cat, tabby\""));
        assert!(lines[2].contains("\"say \"\"hi\"\"\""));
    }

    #[test]
    fn csv_floats_survive_a_round_trip() {
        let mut result = sample_result(true);
        result.records[0].latency_ms = 2.0 / 3.0;
        result.records[0].confidence = 0.1 + 0.2;
        let csv = result_to_csv(&result);
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[2].parse::<f64>().unwrap(), 2.0 / 3.0);
        assert_eq!(fields[7].parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn files_write_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let result = sample_result(true);
        let json_path = dir.path().join("r.json");
        let csv_path = dir.path().join("r.csv");
        write_result_json(&result, &json_path).unwrap();
        write_result_csv(&result, &csv_path).unwrap();
        assert_eq!(read_result_json(&json_path).unwrap(), result);
        let csv = std::fs::read_to_string(&csv_path).unwrap();
        assert!(csv.starts_with(CSV_HEADER));

        match read_result_json(&dir.path().join("absent.json")) {
            Err(ReportError::Io { .. }) => {}
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn partial_results_serialize_with_error_context() {
        let result = sample_result(true);
        let partial = PartialRunResult {
            schema_version: crate::result::SCHEMA_VERSION,
            model_id: result.model_id.clone(),
            platform: result.platform.clone(),
            config: result.config.clone(),
            started_at_unix_ms: result.started_at_unix_ms,
            error: "backend exited with signal 9".into(),
            records: result.records[..3].to_vec(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json.partial");
        write_partial_json(&partial, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["error"], "backend exited with signal 9");
        assert_eq!(value["records"].as_array().unwrap().len(), 3);
        assert!(value.get("summaries").is_none());
    }

    #[test]
    fn summaries_match_recomputation_after_round_trip() {
        let result = sample_result(true);
        let parsed = parse_result_json(&result_to_json(&result)).unwrap();
        let fresh: RunSummaries = stats::summarize_records(&parsed.records).unwrap();
        assert_eq!(fresh, parsed.summaries);
    }
}
