//! PICO measures single-inference performance of small models on
//! embedded-class Linux systems: per-iteration latency, CPU and memory
//! utilization, and prediction confidence, with statistical summaries,
//! cross-run comparison, and SVG charts.
//!
//! The pipeline is: preprocess dataset samples into tensors, drive a
//! backend (synthetic, subprocess over NDJSON, or recorded replay) for N
//! measured iterations, snapshot `/proc`-style counters around each
//! inference, then persist and visualize the results.

pub mod backends;
pub mod cli;
pub mod config;
pub mod preprocess;
pub mod report;
pub mod result;
pub mod runner;
pub mod stats;
pub mod sysmon;

pub use backends::{Backend, BackendError, BackendSpec, InferenceOutput};
pub use config::{load_config, BenchmarkConfig, ConfigError};
pub use preprocess::{InputTensor, PreprocessError, PreprocessParams};
pub use report::{read_result_json, write_result_csv, write_result_json, ReportError};
pub use result::{IterationRecord, PlatformInfo, RunResult, RunSummaries, SCHEMA_VERSION};
pub use runner::{load_manifest, run_benchmark, Dataset, RunError, RunOutcome};
pub use stats::{compare, stability, summarize, ComparisonReport, MetricSummary, StabilityReport};
pub use sysmon::{CounterSources, CpuSnapshot, MemSnapshot, SysmonError};
