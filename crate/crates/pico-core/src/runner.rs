//! Benchmark orchestration: manifest loading, sample preparation, warmup,
//! and the measured inference loop.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Deserialize;
use thiserror::Error;

use crate::backends::{self, Backend, BackendError};
use crate::config::BenchmarkConfig;
use crate::preprocess::{
    self, ImageParams, ImageTensor, InputTensor, PreprocessError, PreprocessParams,
    PreprocessPatch, TensorData,
};
use crate::result::{IterationRecord, PartialRunResult, PlatformInfo, RunResult, SCHEMA_VERSION};
use crate::stats::{self, StatsError};
use crate::sysmon::{self, CounterSources, CpuSnapshot, SysmonError};

/// Environment variable overriding the CPU model description file.
pub const CPUINFO_PATH_ENV: &str = "PICO_CPUINFO_PATH";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("sample file missing: {path}")]
    MissingSampleFile { path: PathBuf },
    #[error("cannot read sample {sample_id} from {path}: {source}")]
    SampleIo {
        sample_id: String,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("sample {sample_id}: {source}")]
    Preprocess {
        sample_id: String,
        source: PreprocessError,
    },
    #[error("backend failed to load: {0}")]
    BackendLoad(#[from] BackendError),
    /// Inference failed mid-run; everything measured so far rides along so
    /// the caller can flush it.
    #[error("backend failed on iteration {}: {error}", partial.records.len())]
    BackendInfer {
        error: BackendError,
        partial: Box<PartialRunResult>,
    },
    #[error("system counters: {0}")]
    Sysmon(#[from] SysmonError),
    #[error("statistics: {0}")]
    Stats(#[from] StatsError),
    #[error("invalid run setup: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Image,
    Audio,
    Tensor,
}

impl std::fmt::Display for SampleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleKind::Image => "image",
            SampleKind::Audio => "audio",
            SampleKind::Tensor => "tensor",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SampleEntry {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: SampleKind,
    /// Resolved to an absolute path during manifest loading.
    pub path: PathBuf,
    #[serde(default)]
    pub preprocess: Option<PreprocessPatch>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub samples: Vec<SampleEntry>,
}

/// Reads a manifest and resolves sample paths relative to it, without
/// touching the sample files themselves. `cmd_validate` builds on this to
/// report per-sample problems instead of stopping at the first one.
pub fn parse_manifest(path: &Path) -> Result<Dataset, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Manifest(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut dataset: Dataset = serde_path_to_error::deserialize(de)
        .map_err(|e| RunError::Manifest(format!("at {}: {}", e.path(), e.inner())))?;
    if dataset.samples.is_empty() {
        return Err(RunError::Manifest("no samples".into()));
    }

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for sample in &mut dataset.samples {
        if sample.path.is_relative() {
            sample.path = base.join(&sample.path);
        }
    }
    Ok(dataset)
}

/// Loads a dataset manifest and checks that every referenced file exists.
pub fn load_manifest(path: &Path) -> Result<Dataset, RunError> {
    let dataset = parse_manifest(path)?;
    for sample in &dataset.samples {
        if !sample.path.is_file() {
            return Err(RunError::MissingSampleFile {
                path: sample.path.clone(),
            });
        }
    }
    Ok(dataset)
}

fn image_from_tensor(t: &InputTensor) -> Result<ImageTensor, PreprocessError> {
    let (h, w, c) = match t.shape[..] {
        [h, w] => (h, w, 1),
        [h, w, c] => (h, w, c),
        _ => {
            return Err(PreprocessError::InvalidInput(format!(
                "image tensors need a HxW or HxWxC shape, got {:?}",
                t.shape
            )))
        }
    };
    ImageTensor::new(h, w, c, t.data.to_f64())
}

fn apply_image_pipeline(
    raw: &InputTensor,
    params: &ImageParams,
) -> Result<InputTensor, PreprocessError> {
    let mut img = image_from_tensor(raw)?;
    if let Some((out_h, out_w)) = params.resize {
        img = preprocess::resize_bilinear(&img, out_h, out_w)?;
    }
    if let (Some(mean), Some(std)) = (&params.mean, &params.std) {
        img = preprocess::normalize(&img, mean, std)?;
    }
    let shape = vec![img.height, img.width, img.channels];
    let data: Vec<f32> = img.data.iter().map(|&v| v as f32).collect();
    let tensor = InputTensor::new(shape, TensorData::F32(data), params.quantize.clone())?;
    if tensor.quantization.is_some() {
        preprocess::quantize(&tensor)
    } else {
        Ok(tensor)
    }
}

/// Turns one manifest entry into the tensor handed to the backend,
/// honoring the run-wide parameters plus the entry's own patch.
pub fn prepare_sample(
    entry: &SampleEntry,
    params: &PreprocessParams,
) -> Result<InputTensor, RunError> {
    let bytes = fs::read(&entry.path).map_err(|source| RunError::SampleIo {
        sample_id: entry.id.clone(),
        path: entry.path.clone(),
        source,
    })?;
    let patch = entry.preprocess.clone().unwrap_or_default();
    let fail = |source| RunError::Preprocess {
        sample_id: entry.id.clone(),
        source,
    };

    match entry.kind {
        SampleKind::Tensor => {
            let p = patch.apply_tensor(&params.tensor);
            let mut tensor = preprocess::parse_pten(&bytes).map_err(fail)?;
            if let Some(q) = p.quantize {
                tensor.quantization = Some(q);
                tensor = preprocess::quantize(&tensor).map_err(fail)?;
            }
            Ok(tensor)
        }
        SampleKind::Image => {
            let p = patch.apply_image(&params.image);
            let raw = preprocess::parse_pten(&bytes).map_err(fail)?;
            apply_image_pipeline(&raw, &p).map_err(fail)
        }
        SampleKind::Audio => {
            let p = patch.apply_audio(&params.audio);
            let clip = preprocess::decode_wav_pcm16(&bytes).map_err(fail)?;
            let spec =
                preprocess::stft_log_power_with_floor(&clip, p.frame_len, p.hop_len, p.log_floor)
                    .map_err(fail)?;
            let data: Vec<f32> = spec.values.iter().map(|&v| v as f32).collect();
            InputTensor::new(
                vec![spec.n_frames, spec.n_bins],
                TensorData::F32(data),
                None,
            )
            .map_err(fail)
        }
    }
}

/// Best-effort machine description. Anything unreadable degrades to
/// "unknown" rather than failing.
pub fn detect_platform(label: &str, cpuinfo_path: &Path, counters: &CounterSources) -> PlatformInfo {
    let cpu_model = fs::read_to_string(cpuinfo_path)
        .ok()
        .and_then(|text| parse_cpu_model(&text))
        .unwrap_or_else(|| "unknown".into());
    let cores = std::thread::available_parallelism()
        .map(|n| n.get() as u64)
        .unwrap_or(1);
    let total_memory_kb = counters
        .read_mem_snapshot()
        .map(|m| m.total_kb)
        .unwrap_or(0);
    PlatformInfo {
        label: label.to_string(),
        os: std::env::consts::OS.to_string(),
        cpu_model,
        cores,
        total_memory_kb,
    }
}

/// First "model name", "Model", or "Hardware" entry, covering x86 and the
/// common ARM single-board layouts.
fn parse_cpu_model(cpuinfo: &str) -> Option<String> {
    for key in ["model name", "Model", "Hardware"] {
        for line in cpuinfo.lines() {
            if let Some(rest) = line.strip_prefix(key) {
                if let Some((_, value)) = rest.split_once(':') {
                    let value = value.trim();
                    if !value.is_empty() {
                        return Some(value.to_string());
                    }
                }
            }
        }
    }
    None
}

/// Default CPU description file, overridable via `PICO_CPUINFO_PATH`.
pub fn default_cpuinfo_path() -> PathBuf {
    std::env::var(CPUINFO_PATH_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|_| PathBuf::from("/proc/cpuinfo"))
}

/// Non-fatal observations made during a run; callers decide whether to
/// surface them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunWarning {
    /// Inference finished between two clock ticks; the latency was recorded
    /// as the clock's minimum positive resolution.
    ZeroLatencyClamped { index: u64 },
    /// CPU counters went backwards across this iteration (counter reset or
    /// suspend); the reading was dropped.
    CpuCountersReset { index: u64 },
}

impl std::fmt::Display for RunWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunWarning::ZeroLatencyClamped { index } => write!(
                f,
                "iteration {index}: inference finished between clock ticks; latency clamped to 1 ns"
            ),
            RunWarning::CpuCountersReset { index } => write!(
                f,
                "iteration {index}: CPU counters decreased; reading dropped"
            ),
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub result: RunResult,
    pub warnings: Vec<RunWarning>,
}

fn unix_ms_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn cpu_window(
    a: &CpuSnapshot,
    b: &CpuSnapshot,
    index: u64,
    warnings: &mut Vec<RunWarning>,
) -> Option<f64> {
    match sysmon::cpu_utilization(a, b) {
        Ok(pct) => Some(pct),
        Err(SysmonError::NoDelta) => None,
        Err(_) => {
            warnings.push(RunWarning::CpuCountersReset { index });
            None
        }
    }
}

/// Runs the full benchmark described by the config: loads the manifest,
/// prepares every sample up front, loads the backend, and measures.
pub fn run_benchmark(
    cfg: &BenchmarkConfig,
    counters: &CounterSources,
    platform: PlatformInfo,
) -> Result<RunOutcome, RunError> {
    let dataset = load_manifest(&cfg.manifest_path)?;
    let mut samples = Vec::with_capacity(dataset.samples.len());
    for entry in &dataset.samples {
        samples.push((entry.id.clone(), prepare_sample(entry, &cfg.preprocess)?));
    }
    let mut backend = backends::load(&cfg.backend, cfg.seed)?;
    let outcome = run_with_backend(cfg, &samples, backend.as_mut(), counters, platform);
    backend.close();
    outcome
}

/// The measured loop against an already-loaded backend and prepared
/// samples. Iteration `i` uses sample `i % samples.len()`; warmup
/// iterations cycle the same way and leave no trace in the records.
///
/// Per measured iteration the probe order is fixed: memory before, CPU
/// before, clock start, inference, clock stop, CPU after, memory after.
/// This loop stays single-threaded so nothing competes with the inference
/// being measured.
pub fn run_with_backend(
    cfg: &BenchmarkConfig,
    samples: &[(String, InputTensor)],
    backend: &mut dyn Backend,
    counters: &CounterSources,
    platform: PlatformInfo,
) -> Result<RunOutcome, RunError> {
    if cfg.iterations == 0 {
        return Err(RunError::InvalidConfig("iterations must be at least 1".into()));
    }
    if samples.is_empty() {
        return Err(RunError::InvalidConfig("no samples to run".into()));
    }

    let started_at_unix_ms = unix_ms_now();
    let mut warnings = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::with_capacity(cfg.iterations as usize);

    let partial = |records: Vec<IterationRecord>, error: &BackendError| -> Box<PartialRunResult> {
        Box::new(PartialRunResult {
            schema_version: SCHEMA_VERSION,
            model_id: cfg.model_id.clone(),
            platform: platform.clone(),
            config: cfg.clone(),
            started_at_unix_ms,
            error: error.to_string(),
            records,
        })
    };

    for i in 0..cfg.warmup {
        let (_, tensor) = &samples[(i % samples.len() as u64) as usize];
        if let Err(error) = backend.infer(tensor) {
            let partial = partial(records, &error);
            return Err(RunError::BackendInfer { error, partial });
        }
    }

    let run_cpu_a = counters.read_cpu_snapshot()?;
    for i in 0..cfg.iterations {
        let (sample_id, tensor) = &samples[(i % samples.len() as u64) as usize];

        let mem_before = counters.read_mem_snapshot()?;
        let cpu_a = counters.read_cpu_snapshot()?;
        let t0 = Instant::now();
        let output = match backend.infer(tensor) {
            Ok(output) => output,
            Err(error) => {
                let partial = partial(records, &error);
                return Err(RunError::BackendInfer { error, partial });
            }
        };
        let elapsed = t0.elapsed();
        let cpu_b = counters.read_cpu_snapshot()?;
        let mem_after = counters.read_mem_snapshot()?;

        let mut nanos = elapsed.as_nanos() as u64;
        if nanos == 0 {
            nanos = 1;
            warnings.push(RunWarning::ZeroLatencyClamped { index: i });
        }

        records.push(IterationRecord {
            index: i,
            sample_id: sample_id.clone(),
            latency_ms: nanos as f64 / 1e6,
            cpu_pct: cpu_window(&cpu_a, &cpu_b, i, &mut warnings),
            mem_pct_before: sysmon::memory_utilization(&mem_before),
            mem_pct_after: sysmon::memory_utilization(&mem_after),
            predicted_label: output.label,
            confidence: output.confidence,
        });
    }
    let run_cpu_b = counters.read_cpu_snapshot()?;

    let summaries = stats::summarize_records(&records)?;
    let result = RunResult {
        schema_version: SCHEMA_VERSION,
        model_id: cfg.model_id.clone(),
        platform,
        config: cfg.clone(),
        started_at_unix_ms,
        cpu_pct_run: cpu_window(&run_cpu_a, &run_cpu_b, 0, &mut Vec::new()),
        records,
        summaries,
    };
    Ok(RunOutcome { result, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{BackendSpec, InferenceOutput};
    use crate::preprocess::write_pten;

    struct Fixture {
        dir: tempfile::TempDir,
    }

    impl Fixture {
        fn new(n_samples: usize, input_len: usize) -> Self {
            let dir = tempfile::tempdir().unwrap();
            std::fs::write(dir.path().join("stat"), "cpu 100 0 50 800 30 0 0 0\n").unwrap();
            std::fs::write(
                dir.path().join("meminfo"),
                "MemTotal: 100000 kB\nMemAvailable: 89000 kB\n",
            )
            .unwrap();

            let mut manifest = String::from("{\"name\":\"fixture\",\"samples\":[");
            for i in 0..n_samples {
                let data: Vec<f32> = (0..input_len).map(|j| (i + j) as f32 * 0.1).collect();
                let tensor = InputTensor::new(
                    vec![input_len],
                    TensorData::F32(data),
                    None,
                )
                .unwrap();
                let name = format!("s{i}.pten");
                std::fs::write(dir.path().join(&name), write_pten(&tensor).unwrap()).unwrap();
                if i > 0 {
                    manifest.push(',');
                }
                manifest.push_str(&format!(
                    "{{\"id\":\"s{i}\",\"type\":\"tensor\",\"path\":\"{name}\"}}"
                ));
            }
            manifest.push_str("]}");
            std::fs::write(dir.path().join("manifest.json"), manifest).unwrap();
            Self { dir }
        }

        fn counters(&self) -> CounterSources {
            CounterSources::with_paths(
                self.dir.path().join("stat"),
                self.dir.path().join("meminfo"),
            )
        }

        fn config(&self, iterations: u64, warmup: u64) -> BenchmarkConfig {
            let mut cfg = BenchmarkConfig::new(
                "fixture-model",
                BackendSpec::Synthetic {
                    n_classes: 3,
                    input_len: 8,
                    busy_ms: 0,
                    seed: Some(7),
                },
                self.dir.path().join("manifest.json"),
            );
            cfg.iterations = iterations;
            cfg.warmup = warmup;
            cfg
        }

        fn run(&self, iterations: u64, warmup: u64) -> RunOutcome {
            let cfg = self.config(iterations, warmup);
            run_benchmark(&cfg, &self.counters(), PlatformInfo::unknown("test")).unwrap()
        }
    }

    #[test]
    fn record_count_and_indices_match_iterations() {
        let fixture = Fixture::new(3, 8);
        let outcome = fixture.run(7, 2);
        let r = &outcome.result;
        assert_eq!(r.records.len(), 7);
        for (i, record) in r.records.iter().enumerate() {
            assert_eq!(record.index, i as u64);
            assert!(record.latency_ms > 0.0);
        }
        assert_eq!(r.summaries.latency_ms.count, 7);
    }

    #[test]
    fn samples_cycle_modularly() {
        let fixture = Fixture::new(3, 8);
        let outcome = fixture.run(7, 0);
        let ids: Vec<&str> = outcome
            .result
            .records
            .iter()
            .map(|r| r.sample_id.as_str())
            .collect();
        assert_eq!(ids, ["s0", "s1", "s2", "s0", "s1", "s2", "s0"]);
    }

    #[test]
    fn warmup_leaves_no_trace() {
        let fixture = Fixture::new(2, 8);
        let without = fixture.run(5, 0);
        let with = fixture.run(5, 4);
        assert_eq!(without.result.records.len(), with.result.records.len());
        let labels = |o: &RunOutcome| -> Vec<(u64, String)> {
            o.result
                .records
                .iter()
                .map(|r| (r.index, r.predicted_label.clone()))
                .collect()
        };
        assert_eq!(labels(&without), labels(&with));
    }

    #[test]
    fn static_counters_mean_no_cpu_readings() {
        let fixture = Fixture::new(2, 8);
        let outcome = fixture.run(4, 0);
        assert!(outcome.result.records.iter().all(|r| r.cpu_pct.is_none()));
        assert!(outcome.result.summaries.cpu_pct.is_none());
        assert_eq!(outcome.result.cpu_pct_run, None);
        // memory fixture: (100000 - 89000) / 100000
        for r in &outcome.result.records {
            assert_eq!(r.mem_pct_before, 11.0);
            assert_eq!(r.mem_pct_after, 11.0);
        }
    }

    #[test]
    fn predictions_are_reproducible_across_runs() {
        let fixture = Fixture::new(3, 8);
        let a = fixture.run(10, 1);
        let b = fixture.run(10, 1);
        let seq = |o: &RunOutcome| -> Vec<(String, f64)> {
            o.result
                .records
                .iter()
                .map(|r| (r.predicted_label.clone(), r.confidence))
                .collect()
        };
        assert_eq!(seq(&a), seq(&b));
    }

    #[test]
    fn summaries_recompute_from_records() {
        let fixture = Fixture::new(3, 8);
        let outcome = fixture.run(9, 0);
        let again = stats::summarize_records(&outcome.result.records).unwrap();
        assert_eq!(again, outcome.result.summaries);
    }

    #[test]
    fn shape_mismatch_aborts_with_empty_partial() {
        let fixture = Fixture::new(2, 8);
        let mut cfg = fixture.config(5, 0);
        cfg.backend = BackendSpec::Synthetic {
            n_classes: 3,
            input_len: 99,
            busy_ms: 0,
            seed: Some(7),
        };
        let err =
            run_benchmark(&cfg, &fixture.counters(), PlatformInfo::unknown("test")).unwrap_err();
        match err {
            RunError::BackendInfer { error, partial } => {
                assert!(matches!(error, BackendError::ShapeMismatch { .. }));
                assert_eq!(partial.records.len(), 0);
                assert_eq!(partial.model_id, "fixture-model");
                assert!(!partial.error.is_empty());
            }
            other => panic!("wrong error: {other:?}"),
        }
    }

    struct FailAfter {
        calls: usize,
        limit: usize,
    }

    impl Backend for FailAfter {
        fn model_name(&self) -> &str {
            "fail-after"
        }
        fn infer(&mut self, _input: &InputTensor) -> Result<InferenceOutput, BackendError> {
            if self.calls >= self.limit {
                return Err(BackendError::BackendCrashed("gave up".into()));
            }
            self.calls += 1;
            Ok(InferenceOutput {
                label: "ok".into(),
                confidence: 1.0,
                raw_scores: None,
            })
        }
        fn close(&mut self) {}
    }

    #[test]
    fn mid_run_failure_keeps_partial_records() {
        let fixture = Fixture::new(2, 8);
        let cfg = fixture.config(10, 0);
        let samples = vec![(
            "s0".to_string(),
            InputTensor::new(vec![1], TensorData::F32(vec![0.5]), None).unwrap(),
        )];
        let mut backend = FailAfter { calls: 0, limit: 4 };
        let err = run_with_backend(
            &cfg,
            &samples,
            &mut backend,
            &fixture.counters(),
            PlatformInfo::unknown("test"),
        )
        .unwrap_err();
        match err {
            RunError::BackendInfer { partial, .. } => {
                assert_eq!(partial.records.len(), 4);
                assert!(partial.error.contains("gave up"));
            }
            other => panic!("wrong error: {other:?}"),
        }
    }

    #[test]
    fn replay_backend_carries_recorded_output_through() {
        let fixture = Fixture::new(1, 8);
        let trace = fixture.dir.path().join("trace.jsonl");
        std::fs::write(&trace, "{\"label\":\"yes\",\"confidence\":0.99}\n").unwrap();
        let mut cfg = fixture.config(1, 0);
        cfg.backend = BackendSpec::Replay { path: trace };
        let outcome =
            run_benchmark(&cfg, &fixture.counters(), PlatformInfo::unknown("test")).unwrap();
        let record = &outcome.result.records[0];
        assert_eq!(record.predicted_label, "yes");
        assert_eq!(record.confidence, 0.99);
        assert!(record.latency_ms > 0.0);
    }

    #[test]
    fn manifest_errors_carry_context() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");

        std::fs::write(&path, "{\"name\":\"x\",\"samples\":[]}").unwrap();
        match load_manifest(&path) {
            Err(RunError::Manifest(msg)) => assert!(msg.contains("no samples")),
            other => panic!("wrong result: {other:?}"),
        }

        std::fs::write(
            &path,
            "{\"name\":\"x\",\"samples\":[{\"id\":\"a\",\"type\":\"noodle\",\"path\":\"a.pten\"}]}",
        )
        .unwrap();
        match load_manifest(&path) {
            Err(RunError::Manifest(msg)) => {
                assert!(msg.contains("samples[0]"), "{msg}");
            }
            other => panic!("wrong result: {other:?}"),
        }

        std::fs::write(
            &path,
            "{\"name\":\"x\",\"samples\":[{\"id\":\"a\",\"type\":\"tensor\",\"path\":\"gone.pten\"}]}",
        )
        .unwrap();
        match load_manifest(&path) {
            Err(RunError::MissingSampleFile { path }) => {
                assert!(path.ends_with("gone.pten"));
            }
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn preprocess_error_names_the_sample() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.pten"), b"not a tensor").unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            "{\"name\":\"x\",\"samples\":[{\"id\":\"bad-sample\",\"type\":\"tensor\",\"path\":\"bad.pten\"}]}",
        )
        .unwrap();
        let dataset = load_manifest(&dir.path().join("manifest.json")).unwrap();
        let err = prepare_sample(&dataset.samples[0], &PreprocessParams::default()).unwrap_err();
        match err {
            RunError::Preprocess { sample_id, .. } => assert_eq!(sample_id, "bad-sample"),
            other => panic!("wrong error: {other:?}"),
        }
    }

    #[test]
    fn image_pipeline_resizes_normalizes_and_quantizes() {
        use crate::preprocess::Quantization;
        let raw = InputTensor::new(
            vec![2, 2],
            TensorData::F32(vec![0.0, 2.0, 4.0, 6.0]),
            None,
        )
        .unwrap();
        let params = ImageParams {
            resize: Some((1, 1)),
            mean: Some(vec![3.0]),
            std: Some(vec![3.0]),
            quantize: None,
        };
        // (3.0 - 3.0) / 3.0 = 0.0 at the single resized pixel
        let out = apply_image_pipeline(&raw, &params).unwrap();
        assert_eq!(out.shape, vec![1, 1, 1]);
        assert_eq!(out.data, TensorData::F32(vec![0.0]));

        let quantized = apply_image_pipeline(
            &raw,
            &ImageParams {
                resize: Some((1, 1)),
                mean: None,
                std: None,
                quantize: Some(Quantization {
                    scale: 1.0,
                    zero_point: 10,
                }),
            },
        )
        .unwrap();
        // resized value 3.0, quantized: round(3/1) + 10
        assert_eq!(quantized.data, TensorData::U8(vec![13]));
    }

    #[test]
    fn audio_sample_becomes_a_spectrogram_tensor() {
        let dir = tempfile::tempdir().unwrap();
        let wav = preprocess::encode_wav_pcm16(16000, &vec![0i16; 300]);
        std::fs::write(dir.path().join("clip.wav"), wav).unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            "{\"name\":\"x\",\"samples\":[{\"id\":\"c\",\"type\":\"audio\",\"path\":\"clip.wav\",\"preprocess\":{\"frame_len\":128,\"hop_len\":64}}]}",
        )
        .unwrap();
        let dataset = load_manifest(&dir.path().join("manifest.json")).unwrap();
        let tensor = prepare_sample(&dataset.samples[0], &PreprocessParams::default()).unwrap();
        // 1 + (300 - 128) / 64 = 3 frames, 128/2 + 1 = 65 bins
        assert_eq!(tensor.shape, vec![3, 65]);
    }

    #[test]
    fn platform_detection_reads_fixture_cpuinfo() {
        let dir = tempfile::tempdir().unwrap();
        let cpuinfo = dir.path().join("cpuinfo");
        std::fs::write(&cpuinfo, "processor\t: 0\nmodel name\t: Fixture CPU 9000\n").unwrap();
        let fixture = Fixture::new(1, 4);
        let p = detect_platform("boardx", &cpuinfo, &fixture.counters());
        assert_eq!(p.label, "boardx");
        assert_eq!(p.cpu_model, "Fixture CPU 9000");
        assert!(p.cores >= 1);
        assert_eq!(p.total_memory_kb, 100000);

        let missing = detect_platform("y", &dir.path().join("nope"), &fixture.counters());
        assert_eq!(missing.cpu_model, "unknown");
    }

    #[test]
    fn arm_style_cpuinfo_parses() {
        let text = "processor : 0\nBogoMIPS : 108.00\nModel : Raspberry Pi 4 Model B Rev 1.4\n";
        assert_eq!(
            parse_cpu_model(text).as_deref(),
            Some("Raspberry Pi 4 Model B Rev 1.4")
        );
        assert_eq!(parse_cpu_model("no such keys here\n"), None);
    }
}
