//! System-wide CPU and memory counter sampling.
//!
//! CPU utilization is the busy fraction of aggregate kernel tick counters
//! between two snapshots; memory utilization is `(total - available) / total`
//! using the kernel's reclaimable-aware availability estimate. Both counter
//! files can be redirected to fixtures, which are verbatim copies of the
//! kernel file contents.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use thiserror::Error;

/// Environment variable overriding the aggregate CPU counter file.
pub const CPU_STAT_PATH_ENV: &str = "PICO_CPU_STAT_PATH";
/// Environment variable overriding the memory info file.
pub const MEMINFO_PATH_ENV: &str = "PICO_MEMINFO_PATH";

const DEFAULT_CPU_STAT_PATH: &str = "/proc/stat";
const DEFAULT_MEMINFO_PATH: &str = "/proc/meminfo";

#[derive(Debug, Error)]
pub enum SysmonError {
    /// The counter file is missing or does not parse. Callers may fall back
    /// to recording the affected metric as absent.
    #[error("counter source unavailable: {0}")]
    CounterSourceUnavailable(String),
    /// Zero total tick delta: the window was shorter than the counter
    /// resolution. Record the value as absent, not as zero.
    #[error("zero total tick delta between snapshots")]
    NoDelta,
    /// A cumulative counter decreased between snapshots.
    #[error("cpu tick counters decreased between snapshots")]
    NonMonotonic,
}

/// Nanoseconds since an arbitrary process-local monotonic epoch.
pub fn monotonic_ns() -> u64 {
    static EPOCH: OnceLock<Instant> = OnceLock::new();
    EPOCH.get_or_init(Instant::now).elapsed().as_nanos() as u64
}

/// Cumulative system-wide CPU tick counts (jiffies) at one instant.
///
/// Every field is monotone non-decreasing across snapshots taken on the
/// same boot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CpuSnapshot {
    pub user: u64,
    pub nice: u64,
    pub system: u64,
    pub idle: u64,
    pub iowait: u64,
    pub irq: u64,
    pub softirq: u64,
    pub steal: u64,
    /// Monotonic nanoseconds at sampling time.
    pub timestamp_ns: u64,
}

impl CpuSnapshot {
    fn fields(&self) -> [u64; 8] {
        [
            self.user,
            self.nice,
            self.system,
            self.idle,
            self.iowait,
            self.irq,
            self.softirq,
            self.steal,
        ]
    }

    fn total_ticks(&self) -> u128 {
        self.fields().iter().map(|&v| v as u128).sum()
    }

    fn idle_ticks(&self) -> u128 {
        self.idle as u128 + self.iowait as u128
    }

    /// Formats the snapshot back into an aggregate counter line. Parsing the
    /// result reproduces every tick field.
    pub fn to_stat_line(&self) -> String {
        let f = self.fields();
        format!(
            "cpu {} {} {} {} {} {} {} {}",
            f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7]
        )
    }
}

/// System memory counters in kilobytes at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemSnapshot {
    pub total_kb: u64,
    pub available_kb: u64,
    /// Monotonic nanoseconds at sampling time.
    pub timestamp_ns: u64,
}

impl MemSnapshot {
    pub fn new(total_kb: u64, available_kb: u64, timestamp_ns: u64) -> Result<Self, SysmonError> {
        if total_kb == 0 {
            return Err(SysmonError::CounterSourceUnavailable(
                "total memory is zero".into(),
            ));
        }
        if available_kb > total_kb {
            return Err(SysmonError::CounterSourceUnavailable(format!(
                "available memory {available_kb} kB exceeds total {total_kb} kB"
            )));
        }
        Ok(Self {
            total_kb,
            available_kb,
            timestamp_ns,
        })
    }
}

/// Locations of the kernel counter files, overridable for fixtures.
#[derive(Debug, Clone)]
pub struct CounterSources {
    pub cpu_stat_path: PathBuf,
    pub meminfo_path: PathBuf,
}

impl Default for CounterSources {
    fn default() -> Self {
        Self {
            cpu_stat_path: DEFAULT_CPU_STAT_PATH.into(),
            meminfo_path: DEFAULT_MEMINFO_PATH.into(),
        }
    }
}

impl CounterSources {
    /// Default kernel paths, overridden by `PICO_CPU_STAT_PATH` and
    /// `PICO_MEMINFO_PATH` when set.
    pub fn from_env() -> Self {
        let mut sources = Self::default();
        if let Ok(p) = std::env::var(CPU_STAT_PATH_ENV) {
            sources.cpu_stat_path = p.into();
        }
        if let Ok(p) = std::env::var(MEMINFO_PATH_ENV) {
            sources.meminfo_path = p.into();
        }
        sources
    }

    pub fn with_paths(cpu_stat_path: impl Into<PathBuf>, meminfo_path: impl Into<PathBuf>) -> Self {
        Self {
            cpu_stat_path: cpu_stat_path.into(),
            meminfo_path: meminfo_path.into(),
        }
    }

    /// Reads the current cumulative CPU tick counters.
    pub fn read_cpu_snapshot(&self) -> Result<CpuSnapshot, SysmonError> {
        let text = read_counter_file(&self.cpu_stat_path)?;
        parse_cpu_stat(&text, monotonic_ns())
    }

    /// Reads the current memory counters.
    pub fn read_mem_snapshot(&self) -> Result<MemSnapshot, SysmonError> {
        let text = read_counter_file(&self.meminfo_path)?;
        parse_meminfo(&text, monotonic_ns())
    }
}

fn read_counter_file(path: &Path) -> Result<String, SysmonError> {
    fs::read_to_string(path).map_err(|e| {
        SysmonError::CounterSourceUnavailable(format!("{}: {e}", path.display()))
    })
}

/// Parses the aggregate `cpu` line out of kernel CPU counter file contents.
///
/// The first four fields (user, nice, system, idle) are required; trailing
/// fields absent on older kernels parse as zero. Extra fields such as guest
/// time are ignored.
pub fn parse_cpu_stat(text: &str, timestamp_ns: u64) -> Result<CpuSnapshot, SysmonError> {
    let line = text
        .lines()
        .find(|l| {
            let mut it = l.split_whitespace();
            it.next() == Some("cpu")
        })
        .ok_or_else(|| {
            SysmonError::CounterSourceUnavailable("no aggregate \"cpu\" line".into())
        })?;

    let mut ticks = [0u64; 8];
    let mut count = 0;
    for (i, tok) in line.split_whitespace().skip(1).enumerate() {
        if i >= ticks.len() {
            break;
        }
        ticks[i] = tok.parse().map_err(|_| {
            SysmonError::CounterSourceUnavailable(format!(
                "unparsable tick field {tok:?} in {line:?}"
            ))
        })?;
        count = i + 1;
    }
    if count < 4 {
        return Err(SysmonError::CounterSourceUnavailable(format!(
            "expected at least 4 tick fields, found {count}"
        )));
    }

    Ok(CpuSnapshot {
        user: ticks[0],
        nice: ticks[1],
        system: ticks[2],
        idle: ticks[3],
        iowait: ticks[4],
        irq: ticks[5],
        softirq: ticks[6],
        steal: ticks[7],
        timestamp_ns,
    })
}

/// Parses total and available kilobytes out of memory info file contents.
pub fn parse_meminfo(text: &str, timestamp_ns: u64) -> Result<MemSnapshot, SysmonError> {
    let mut total_kb = None;
    let mut available_kb = None;
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("MemTotal:") => total_kb = it.next().and_then(|v| v.parse().ok()),
            Some("MemAvailable:") => available_kb = it.next().and_then(|v| v.parse().ok()),
            _ => {}
        }
        if total_kb.is_some() && available_kb.is_some() {
            break;
        }
    }
    let total_kb = total_kb.ok_or_else(|| {
        SysmonError::CounterSourceUnavailable("missing MemTotal".into())
    })?;
    let available_kb = available_kb.ok_or_else(|| {
        SysmonError::CounterSourceUnavailable("missing MemAvailable".into())
    })?;
    MemSnapshot::new(total_kb, available_kb, timestamp_ns)
}

/// Busy fraction of the window between two snapshots, in percent.
///
/// With `total = Σ all fields` and `idle = idle + iowait`, the result is
/// `100 * ((total_b - total_a) - (idle_b - idle_a)) / (total_b - total_a)`.
/// Only deltas matter: shifting every counter of both snapshots by the same
/// amount leaves the result unchanged.
pub fn cpu_utilization(a: &CpuSnapshot, b: &CpuSnapshot) -> Result<f64, SysmonError> {
    let (fa, fb) = (a.fields(), b.fields());
    if fa.iter().zip(fb.iter()).any(|(x, y)| y < x) {
        return Err(SysmonError::NonMonotonic);
    }
    let total_delta = b.total_ticks() - a.total_ticks();
    if total_delta == 0 {
        return Err(SysmonError::NoDelta);
    }
    let idle_delta = b.idle_ticks() - a.idle_ticks();
    let busy_delta = total_delta - idle_delta;
    Ok(100.0 * busy_delta as f64 / total_delta as f64)
}

/// Percentage of memory in use: `100 * (total - available) / total`.
pub fn memory_utilization(m: &MemSnapshot) -> f64 {
    let used_kb = m.total_kb - m.available_kb;
    100.0 * used_kb as f64 / m.total_kb as f64
}
