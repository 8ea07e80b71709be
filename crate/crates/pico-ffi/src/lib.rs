//! C interface for the pico benchmark runner.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`PicoStatus`] and leaves a human-readable message
//! behind [`pico_last_error_message`] on failure. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`pico_string_free`]. The generated header lives in `include/pico.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::path::Path;
use std::ptr;

use pico_core::{
    BenchmarkConfig, ConfigError, CounterSources, MetricSummary, ReportError, RunError, RunResult,
    load_config, run_benchmark,
};
use pico_core::report::{parse_result_json, read_result_json, result_to_csv, result_to_json,
    write_result_csv, write_result_json};
use pico_core::runner::{default_cpuinfo_path, detect_platform};

/// Outcome of a pico call. Anything other than `Ok` leaves a message
/// retrievable with `pico_last_error_message()`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicoStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Config file rejected, or a setter was given an invalid value.
    Config = 3,
    /// Dataset manifest rejected or a sample file is missing.
    Manifest = 4,
    /// A sample could not be decoded or preprocessed.
    Preprocess = 5,
    /// The inference backend failed to load or crashed mid-run.
    Backend = 6,
    /// System counters (/proc/stat, /proc/meminfo) could not be read.
    Counters = 7,
    /// A result document did not parse or has the wrong schema version.
    ParseResult = 8,
    /// File read or write failed.
    Io = 9,
    /// The requested metric has no readings in this run.
    NoMetric = 10,
    /// Internal panic; state is still consistent but the call did nothing.
    Panic = 11,
}

/// Metric selector for `pico_result_summary()`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicoMetric {
    LatencyMs = 0,
    CpuPct = 1,
    MemPct = 2,
    Confidence = 3,
}

/// Summary statistics for one metric over a run, mirroring the `summaries`
/// block of the result JSON.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PicoMetricSummary {
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

/// Opaque benchmark configuration handle.
pub struct PicoConfig(BenchmarkConfig);

/// Opaque handle to a completed run's full results.
pub struct PicoRunResult(RunResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).unwrap());
}

fn null_arg(name: &str) -> PicoStatus {
    set_error(format!("argument {name} must not be NULL"));
    PicoStatus::NullArgument
}

fn guarded(f: impl FnOnce() -> PicoStatus) -> PicoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PicoStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or point to a NUL-terminated string.
unsafe fn cstr_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, PicoStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(format!("argument {name} is not valid UTF-8"));
            Err(PicoStatus::InvalidUtf8)
        }
    }
}

fn config_status(e: &ConfigError) -> PicoStatus {
    match e {
        ConfigError::Io { .. } => PicoStatus::Io,
        _ => PicoStatus::Config,
    }
}

fn run_status(e: &RunError) -> PicoStatus {
    match e {
        RunError::Manifest(_) | RunError::MissingSampleFile { .. } => PicoStatus::Manifest,
        RunError::SampleIo { .. } => PicoStatus::Io,
        RunError::Preprocess { .. } => PicoStatus::Preprocess,
        RunError::BackendLoad(_) | RunError::BackendInfer { .. } => PicoStatus::Backend,
        RunError::Sysmon(_) => PicoStatus::Counters,
        RunError::Stats(_) | RunError::InvalidConfig(_) => PicoStatus::Config,
    }
}

fn report_status(e: &ReportError) -> PicoStatus {
    match e {
        ReportError::Io { .. } => PicoStatus::Io,
        ReportError::SchemaVersionMismatch { .. } | ReportError::Parse { .. } => {
            PicoStatus::ParseResult
        }
        ReportError::MissingMetric(_) => PicoStatus::NoMetric,
        ReportError::InvalidChart(_) => PicoStatus::Config,
    }
}

fn give_string(out: &mut *mut c_char, text: String) -> PicoStatus {
    let safe = text.replace('\0', " ");
    *out = CString::new(safe).unwrap().into_raw();
    PicoStatus::Ok
}

/// Version of the library as a static string. Never NULL, do not free.
#[unsafe(no_mangle)]
pub extern "C" fn pico_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, empty if none yet.
/// The pointer stays valid until the next failing pico call on the same
/// thread. Never NULL, do not free.
#[unsafe(no_mangle)]
pub extern "C" fn pico_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library through an out-parameter.
/// NULL is accepted and ignored.
///
/// # Safety
/// `s` must be a pointer previously returned by a pico call, or NULL.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Loads and validates a TOML benchmark config. On success writes a new
/// handle to `*out`; release it with `pico_config_free()`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_config_load(
    path: *const c_char,
    out: *mut *mut PicoConfig,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let path = match unsafe { cstr_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match load_config(Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(PicoConfig(cfg)));
                PicoStatus::Ok
            }
            Err(e) => {
                set_error(&e);
                config_status(&e)
            }
        }
    })
}

/// Overrides the number of measured iterations. Must be at least 1.
///
/// # Safety
/// `cfg` must be a live handle from `pico_config_load()`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_config_set_iterations(
    cfg: *mut PicoConfig,
    iterations: u64,
) -> PicoStatus {
    guarded(|| {
        let Some(cfg) = (unsafe { cfg.as_mut() }) else {
            return null_arg("cfg");
        };
        if iterations == 0 {
            set_error("iterations must be at least 1");
            return PicoStatus::Config;
        }
        cfg.0.iterations = iterations;
        PicoStatus::Ok
    })
}

/// Overrides the number of unmeasured warmup iterations. Zero is allowed.
///
/// # Safety
/// `cfg` must be a live handle from `pico_config_load()`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_config_set_warmup(cfg: *mut PicoConfig, warmup: u64) -> PicoStatus {
    guarded(|| {
        let Some(cfg) = (unsafe { cfg.as_mut() }) else {
            return null_arg("cfg");
        };
        cfg.0.warmup = warmup;
        PicoStatus::Ok
    })
}

/// Overrides the run seed, which a synthetic backend without its own seed
/// inherits.
///
/// # Safety
/// `cfg` must be a live handle from `pico_config_load()`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_config_set_seed(cfg: *mut PicoConfig, seed: u64) -> PicoStatus {
    guarded(|| {
        let Some(cfg) = (unsafe { cfg.as_mut() }) else {
            return null_arg("cfg");
        };
        cfg.0.seed = seed;
        PicoStatus::Ok
    })
}

/// Releases a config handle. NULL is accepted and ignored.
///
/// # Safety
/// `cfg` must be a handle from `pico_config_load()` not yet freed, or NULL.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_config_free(cfg: *mut PicoConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Runs the benchmark described by `cfg`: loads the dataset, runs warmup and
/// measured iterations against the configured backend, and on success writes
/// a result handle to `*out`. Release it with `pico_result_free()`. Platform
/// and system counters are detected from the host. If the backend fails
/// mid-run no handle is produced; partial data is not retained.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_run(
    cfg: *const PicoConfig,
    out: *mut *mut PicoRunResult,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let Some(cfg) = (unsafe { cfg.as_ref() }) else {
            return null_arg("cfg");
        };
        let counters = CounterSources::from_env();
        let platform = detect_platform(&cfg.0.platform_label, &default_cpuinfo_path(), &counters);
        match run_benchmark(&cfg.0, &counters, platform) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(PicoRunResult(outcome.result)));
                PicoStatus::Ok
            }
            Err(e) => {
                set_error(&e);
                run_status(&e)
            }
        }
    })
}

/// Reads a result JSON file produced by a previous run.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_load(
    path: *const c_char,
    out: *mut *mut PicoRunResult,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let path = match unsafe { cstr_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match read_result_json(Path::new(path)) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(PicoRunResult(result)));
                PicoStatus::Ok
            }
            Err(e) => {
                set_error(&e);
                report_status(&e)
            }
        }
    })
}

/// Parses a result document from a JSON string.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_from_json(
    text: *const c_char,
    out: *mut *mut PicoRunResult,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let text = match unsafe { cstr_arg(text, "text") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_result_json(text) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(PicoRunResult(result)));
                PicoStatus::Ok
            }
            Err(e) => {
                set_error(&e);
                report_status(&e)
            }
        }
    })
}

/// Serializes the result to its JSON document form. The returned string is
/// owned by the caller; release with `pico_string_free()`.
///
/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_to_json(
    res: *const PicoRunResult,
    out: *mut *mut c_char,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        give_string(out, result_to_json(&res.0))
    })
}

/// Serializes the per-iteration records to CSV, header line first. The
/// returned string is owned by the caller; release with `pico_string_free()`.
///
/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_to_csv(
    res: *const PicoRunResult,
    out: *mut *mut c_char,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        give_string(out, result_to_csv(&res.0))
    })
}

/// Writes the result JSON document to a file.
///
/// # Safety
/// `res` must be a live result handle, `path` a NUL-terminated string.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_write_json(
    res: *const PicoRunResult,
    path: *const c_char,
) -> PicoStatus {
    guarded(|| {
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        let path = match unsafe { cstr_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match write_result_json(&res.0, Path::new(path)) {
            Ok(()) => PicoStatus::Ok,
            Err(e) => {
                set_error(&e);
                report_status(&e)
            }
        }
    })
}

/// Writes the per-iteration records to a CSV file.
///
/// # Safety
/// `res` must be a live result handle, `path` a NUL-terminated string.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_write_csv(
    res: *const PicoRunResult,
    path: *const c_char,
) -> PicoStatus {
    guarded(|| {
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        let path = match unsafe { cstr_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match write_result_csv(&res.0, Path::new(path)) {
            Ok(()) => PicoStatus::Ok,
            Err(e) => {
                set_error(&e);
                report_status(&e)
            }
        }
    })
}

/// Number of measured iteration records in the result. Returns 0 for NULL.
///
/// # Safety
/// `res` must be a live result handle or NULL.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_record_count(res: *const PicoRunResult) -> u64 {
    match unsafe { res.as_ref() } {
        Some(res) => res.0.records.len() as u64,
        None => 0,
    }
}

/// Copies the model id into a caller-owned string; release with
/// `pico_string_free()`.
///
/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_model_id(
    res: *const PicoRunResult,
    out: *mut *mut c_char,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        *out = ptr::null_mut();
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        give_string(out, res.0.model_id.clone())
    })
}

fn fill_summary(out: &mut PicoMetricSummary, s: &MetricSummary) {
    *out = PicoMetricSummary {
        count: s.count,
        mean: s.mean,
        std: s.std,
        min: s.min,
        max: s.max,
        p50: s.p50,
        p90: s.p90,
        p95: s.p95,
        p99: s.p99,
    };
}

/// Copies the summary statistics for one metric into `*out`. Returns
/// `NoMetric` for `CpuPct` when no iteration produced a CPU reading.
///
/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_summary(
    res: *const PicoRunResult,
    metric: PicoMetric,
    out: *mut PicoMetricSummary,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        let summaries = &res.0.summaries;
        let summary = match metric {
            PicoMetric::LatencyMs => &summaries.latency_ms,
            PicoMetric::CpuPct => match &summaries.cpu_pct {
                Some(s) => s,
                None => {
                    set_error("run has no cpu_pct readings");
                    return PicoStatus::NoMetric;
                }
            },
            PicoMetric::MemPct => &summaries.mem_pct,
            PicoMetric::Confidence => &summaries.confidence,
        };
        fill_summary(out, summary);
        PicoStatus::Ok
    })
}

/// CPU utilization over one window spanning the whole measured phase.
/// Returns `NoMetric` when no counter tick advanced during the run.
///
/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_cpu_pct_run(
    res: *const PicoRunResult,
    out: *mut f64,
) -> PicoStatus {
    guarded(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return null_arg("out");
        };
        let Some(res) = (unsafe { res.as_ref() }) else {
            return null_arg("res");
        };
        match res.0.cpu_pct_run {
            Some(pct) => {
                *out = pct;
                PicoStatus::Ok
            }
            None => {
                set_error("run has no whole-phase cpu reading");
                PicoStatus::NoMetric
            }
        }
    })
}

/// Releases a result handle. NULL is accepted and ignored.
///
/// # Safety
/// `res` must be a handle not yet freed, or NULL.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn pico_result_free(res: *mut PicoRunResult) {
    if !res.is_null() {
        drop(unsafe { Box::from_raw(res) });
    }
}
