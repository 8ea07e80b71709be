//! Benchmark run configuration and the TOML file that carries it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backends::BackendSpec;
use crate::preprocess::PreprocessParams;

pub const DEFAULT_ITERATIONS: u64 = 100;
pub const DEFAULT_WARMUP: u64 = 5;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Everything one benchmark run needs. Serialized verbatim into the result
/// file so a report is self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub model_id: String,
    pub backend: BackendSpec,
    /// Dataset manifest; relative paths in the config file are resolved
    /// against the config file's directory at load time.
    pub manifest_path: PathBuf,
    #[serde(default = "default_iterations")]
    pub iterations: u64,
    #[serde(default = "default_warmup")]
    pub warmup: u64,
    #[serde(default = "default_platform_label")]
    pub platform_label: String,
    /// Run seed; a synthetic backend without its own seed inherits it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub preprocess: PreprocessParams,
}

fn default_iterations() -> u64 {
    DEFAULT_ITERATIONS
}

fn default_warmup() -> u64 {
    DEFAULT_WARMUP
}

fn default_platform_label() -> String {
    "unlabeled".into()
}

impl BenchmarkConfig {
    /// Minimal config around a given backend, defaults everywhere else.
    /// Useful when embedding the runner without a config file.
    pub fn new(model_id: impl Into<String>, backend: BackendSpec, manifest_path: impl Into<PathBuf>) -> Self {
        Self {
            model_id: model_id.into(),
            backend,
            manifest_path: manifest_path.into(),
            iterations: DEFAULT_ITERATIONS,
            warmup: DEFAULT_WARMUP,
            platform_label: default_platform_label(),
            seed: 0,
            preprocess: PreprocessParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.model_id.is_empty() {
            return Err(ConfigError::Invalid("model_id must not be empty".into()));
        }
        if self.iterations == 0 {
            return Err(ConfigError::Invalid("iterations must be at least 1".into()));
        }
        self.backend
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let audio = &self.preprocess.audio;
        if !audio.frame_len.is_power_of_two() {
            return Err(ConfigError::Invalid(format!(
                "preprocess.audio.frame_len must be a power of two, got {}",
                audio.frame_len
            )));
        }
        if audio.hop_len == 0 {
            return Err(ConfigError::Invalid(
                "preprocess.audio.hop_len must be at least 1".into(),
            ));
        }
        if !(audio.log_floor > 0.0 && audio.log_floor.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "preprocess.audio.log_floor must be positive, got {}",
                audio.log_floor
            )));
        }

        let image = &self.preprocess.image;
        if let Some((h, w)) = image.resize {
            if h == 0 || w == 0 {
                return Err(ConfigError::Invalid(
                    "preprocess.image.resize dimensions must be positive".into(),
                ));
            }
        }
        match (&image.mean, &image.std) {
            (Some(m), Some(s)) if m.len() != s.len() => {
                return Err(ConfigError::Invalid(
                    "preprocess.image.mean and std must have equal lengths".into(),
                ));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(ConfigError::Invalid(
                    "preprocess.image.mean and std must be given together".into(),
                ));
            }
            _ => {}
        }
        for q in [&image.quantize, &self.preprocess.tensor.quantize]
            .into_iter()
            .flatten()
        {
            if !(q.scale > 0.0 && q.scale.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "quantization scale must be positive, got {}",
                    q.scale
                )));
            }
        }
        Ok(())
    }

    /// Resolves paths that are relative to the config file location.
    fn resolve_paths(&mut self, config_dir: &Path) {
        if self.manifest_path.is_relative() {
            self.manifest_path = config_dir.join(&self.manifest_path);
        }
        if let BackendSpec::Replay { path } = &mut self.backend {
            if path.is_relative() {
                *path = config_dir.join(&*path);
            }
        }
    }
}

/// Reads, parses, validates, and path-resolves a config file.
pub fn load_config(path: &Path) -> Result<BenchmarkConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg: BenchmarkConfig =
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    cfg.resolve_paths(dir);
    Ok(cfg)
}
