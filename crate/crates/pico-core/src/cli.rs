//! Command-line front end: run, report, compare, validate.
//!
//! stdout carries results and tables only; every diagnostic goes to stderr
//! prefixed with a stable "PICO-Exxx:" code so scripts can grep for the
//! failure class. Exit codes: 0 success, 1 config or parse errors, 2
//! backend failures (partial results flushed first), 3 I/O and system
//! errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{self, ConfigError};
use crate::preprocess::PreprocessParams;
use crate::report::{self, ChartKind, ChartSpec, ReportError};
use crate::result::RunResult;
use crate::runner::{self, RunError};
use crate::stats::{self, CpuAggregation};
use crate::sysmon::CounterSources;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BACKEND: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Stable diagnostic prefixes, one per failure class.
mod code {
    pub const CONFIG: &str = "PICO-E001";
    pub const MANIFEST: &str = "PICO-E002";
    pub const PREPROCESS: &str = "PICO-E003";
    pub const BACKEND: &str = "PICO-E004";
    pub const COUNTERS: &str = "PICO-E005";
    pub const RESULT_PARSE: &str = "PICO-E006";
    pub const IO: &str = "PICO-E007";
    pub const CHART: &str = "PICO-E008";
    pub const USAGE: &str = "PICO-E009";
}

#[derive(Parser)]
#[command(
    name = "pico",
    version,
    about = "Benchmark TinyML-style inference backends: latency, CPU, memory, confidence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a TOML config and write JSON + CSV results
    Run {
        /// Benchmark config file
        config: PathBuf,
        /// Result JSON path; the CSV lands next to it
        #[arg(long, default_value = "pico-result.json")]
        out: PathBuf,
        /// Override the configured measured-iteration count
        #[arg(long)]
        iterations: Option<u64>,
        /// Override the configured warmup count
        #[arg(long)]
        warmup: Option<u64>,
        /// Override the configured RNG seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render the four chart kinds from a result file and print summaries
    Report {
        /// Result JSON produced by `pico run`
        result: PathBuf,
        /// Output directory for SVG files
        #[arg(long, default_value = "charts")]
        charts: PathBuf,
    },
    /// Compare two result files metric by metric
    Compare {
        result_a: PathBuf,
        result_b: PathBuf,
        /// Use the whole-run CPU window instead of the per-iteration mean
        #[arg(long)]
        cpu_window: bool,
    },
    /// Check that every sample in a manifest exists and decodes
    Validate {
        /// Dataset manifest JSON
        manifest: PathBuf,
    },
}

/// Dispatches a full CLI invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.exit_code() == 0 {
                let _ = e.print();
                return EXIT_OK;
            }
            eprintln!("{}: invalid command line", code::USAGE);
            let _ = e.print();
            return EXIT_CONFIG;
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            iterations,
            warmup,
            seed,
        } => cmd_run(&config, &out, iterations, warmup, seed),
        Command::Report { result, charts } => cmd_report(&result, &charts),
        Command::Compare {
            result_a,
            result_b,
            cpu_window,
        } => cmd_compare(&result_a, &result_b, cpu_window),
        Command::Validate { manifest } => cmd_validate(&manifest),
    }
}

fn fail(code: &str, msg: impl std::fmt::Display, exit: i32) -> i32 {
    eprintln!("{code}: {msg}");
    exit
}

fn config_error(e: &ConfigError) -> i32 {
    match e {
        ConfigError::Io { .. } => fail(code::IO, e, EXIT_IO),
        _ => fail(code::CONFIG, e, EXIT_CONFIG),
    }
}

fn report_error(e: &ReportError) -> i32 {
    match e {
        ReportError::Io { .. } => fail(code::IO, e, EXIT_IO),
        ReportError::SchemaVersionMismatch { .. } | ReportError::Parse { .. } => {
            fail(code::RESULT_PARSE, e, EXIT_CONFIG)
        }
        ReportError::MissingMetric(_) | ReportError::InvalidChart(_) => {
            fail(code::CHART, e, EXIT_IO)
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "n/a".into())
}

fn print_run_summary(result: &RunResult, out: &Path, csv: &Path) {
    let s = &result.summaries;
    let rows = [
        ("model", result.model_id.clone()),
        ("platform", result.platform.label.clone()),
        ("iterations", s.latency_ms.count.to_string()),
        ("mean latency", format!("{:.2} ms", s.latency_ms.mean)),
        ("p95 latency", format!("{:.2} ms", s.latency_ms.p95)),
        (
            "mean cpu",
            s.cpu_pct
                .as_ref()
                .map(|c| format!("{:.2} %", c.mean))
                .unwrap_or_else(|| "n/a".into()),
        ),
        ("mean memory", format!("{:.2} %", s.mem_pct.mean)),
        ("result", out.display().to_string()),
        ("csv", csv.display().to_string()),
    ];
    for (label, value) in rows {
        println!("{label:<14} {value}");
    }
}

fn cmd_run(
    config_path: &Path,
    out: &Path,
    iterations: Option<u64>,
    warmup: Option<u64>,
    seed: Option<u64>,
) -> i32 {
    let mut cfg = match config::load_config(config_path) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    if let Some(n) = iterations {
        cfg.iterations = n;
    }
    if let Some(w) = warmup {
        cfg.warmup = w;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Err(e) = cfg.validate() {
        return config_error(&e);
    }

    let counters = CounterSources::from_env();
    let platform = runner::detect_platform(
        &cfg.platform_label,
        &runner::default_cpuinfo_path(),
        &counters,
    );

    let outcome = match runner::run_benchmark(&cfg, &counters, platform) {
        Ok(outcome) => outcome,
        Err(RunError::BackendInfer { error, partial }) => {
            let mut partial_path = out.as_os_str().to_owned();
            partial_path.push(".partial");
            let partial_path = PathBuf::from(partial_path);
            match report::write_partial_json(&partial, &partial_path) {
                Ok(()) => eprintln!(
                    "{}: {} measured records flushed to {}",
                    code::BACKEND,
                    partial.records.len(),
                    partial_path.display()
                ),
                Err(io) => eprintln!("{}: could not flush partial results: {io}", code::IO),
            }
            return fail(code::BACKEND, error, EXIT_BACKEND);
        }
        Err(e @ (RunError::Manifest(_) | RunError::MissingSampleFile { .. })) => {
            return fail(code::MANIFEST, e, EXIT_CONFIG)
        }
        Err(e @ RunError::Preprocess { .. }) => return fail(code::PREPROCESS, e, EXIT_CONFIG),
        Err(e @ RunError::BackendLoad(_)) => return fail(code::BACKEND, e, EXIT_BACKEND),
        Err(e @ RunError::Sysmon(_)) => return fail(code::COUNTERS, e, EXIT_IO),
        Err(e @ RunError::SampleIo { .. }) => return fail(code::IO, e, EXIT_IO),
        Err(e @ (RunError::Stats(_) | RunError::InvalidConfig(_))) => {
            return fail(code::CONFIG, e, EXIT_CONFIG)
        }
    };

    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    let result = outcome.result;
    if let Err(e) = report::write_result_json(&result, out) {
        return report_error(&e);
    }
    let csv = out.with_extension("csv");
    if let Err(e) = report::write_result_csv(&result, &csv) {
        return report_error(&e);
    }
    print_run_summary(&result, out, &csv);
    EXIT_OK
}

fn print_summaries(result: &RunResult) {
    let s = &result.summaries;
    println!(
        "{:<12} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "metric", "count", "mean", "std", "min", "p50", "p95", "max"
    );
    let mut rows: Vec<(&str, &stats::MetricSummary)> = vec![("latency_ms", &s.latency_ms)];
    if let Some(cpu) = &s.cpu_pct {
        rows.push(("cpu_pct", cpu));
    }
    rows.push(("mem_pct", &s.mem_pct));
    rows.push(("confidence", &s.confidence));
    for (name, m) in rows {
        println!(
            "{:<12} {:>8} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2}",
            name, m.count, m.mean, m.std, m.min, m.p50, m.p95, m.max
        );
    }
}

fn cmd_report(result_path: &Path, charts_dir: &Path) -> i32 {
    let result = match report::read_result_json(result_path) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    if let Err(e) = std::fs::create_dir_all(charts_dir) {
        return fail(code::IO, format!("cannot create {}: {e}", charts_dir.display()), EXIT_IO);
    }

    let model = result.model_id.clone();
    let specs = [
        ChartSpec::new(ChartKind::LatencyHistogram, format!("Latency Distribution ({model})")),
        ChartSpec::new(ChartKind::MetricTrend, format!("CPU and Memory Utilization ({model})")),
        ChartSpec::new(ChartKind::ConfidenceTrend, format!("Confidence Trend ({model})")),
        ChartSpec::new(ChartKind::PredictionBar, format!("Prediction Distribution ({model})")),
    ];
    for spec in &specs {
        let path = charts_dir.join(format!("{}.svg", spec.kind.slug()));
        match report::render_chart(&result, spec, &path) {
            Ok(()) => eprintln!("wrote {}", path.display()),
            Err(ReportError::MissingMetric(metric)) => {
                eprintln!(
                    "warning: skipping {}: run has no {metric} readings",
                    spec.kind.slug()
                );
            }
            Err(e) => return report_error(&e),
        }
    }
    print_summaries(&result);
    EXIT_OK
}

fn cmd_compare(a_path: &Path, b_path: &Path, cpu_window: bool) -> i32 {
    let a = match report::read_result_json(a_path) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    let b = match report::read_result_json(b_path) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    let agg = if cpu_window {
        CpuAggregation::WholePhase
    } else {
        CpuAggregation::IterationMean
    };
    let report = stats::compare(&a, &b, agg);

    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "A: {} on {}  B: {} on {}",
        report.run_a.model_id,
        report.run_a.platform_label,
        report.run_b.model_id,
        report.run_b.platform_label
    );
    println!(
        "{:<12} {:>12} {:>12} {:>8} {:>12}",
        "metric", "A", "B", "ratio", "delta"
    );
    for m in &report.metrics {
        println!(
            "{:<12} {:>12.2} {:>12.2} {:>8} {:>12.2}",
            m.metric,
            m.value_a,
            m.value_b,
            fmt_opt(m.ratio),
            m.delta
        );
    }

    let json_path = a_path.with_extension("compare.json");
    let mut text = serde_json::to_string_pretty(&report).expect("comparison serialization");
    text.push('\n');
    if let Err(e) = std::fs::write(&json_path, text) {
        return fail(
            code::IO,
            format!("cannot write {}: {e}", json_path.display()),
            EXIT_IO,
        );
    }
    eprintln!("wrote {}", json_path.display());
    EXIT_OK
}

fn cmd_validate(manifest_path: &Path) -> i32 {
    let dataset = match runner::parse_manifest(manifest_path) {
        Ok(d) => d,
        Err(e) => return fail(code::MANIFEST, e, EXIT_CONFIG),
    };
    let params = PreprocessParams::default();
    let mut failures = 0u64;
    for entry in &dataset.samples {
        match runner::prepare_sample(entry, &params) {
            Ok(tensor) => {
                println!(
                    "OK    {} ({}, shape {:?})",
                    entry.id, entry.kind, tensor.shape
                );
            }
            Err(e) => {
                failures += 1;
                println!("FAIL  {}: {e}", entry.id);
            }
        }
    }
    if failures > 0 {
        fail(
            code::MANIFEST,
            format!(
                "{failures} of {} samples failed validation",
                dataset.samples.len()
            ),
            EXIT_CONFIG,
        )
    } else {
        println!(
            "manifest {} valid: {} samples",
            dataset.name,
            dataset.samples.len()
        );
        EXIT_OK
    }
}
