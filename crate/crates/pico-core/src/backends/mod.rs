//! Inference execution backends: a deterministic synthetic model, an
//! external runner driven over a subprocess pipe, and a recorded-trace
//! replay.
//!
//! A backend handle is confined to one thread at a time; distinct handles
//! may run in parallel.

pub mod replay;
pub mod subprocess;
pub mod synthetic;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::InputTensor;

pub use replay::ReplayBackend;
pub use subprocess::SubprocessBackend;
pub use synthetic::SyntheticBackend;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("failed to spawn {command:?}: {source}")]
    SpawnFailure {
        command: String,
        source: std::io::Error,
    },
    #[error("no ready reply within {timeout_ms} ms of handshake")]
    HandshakeTimeout { timeout_ms: u64 },
    #[error("replay trace missing: {path}")]
    ReplayFileMissing { path: PathBuf },
    #[error("replay trace invalid: {0}")]
    ReplayParse(String),
    #[error("input has {got} elements, backend expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("backend did not answer within {timeout_ms} ms")]
    BackendTimeout { timeout_ms: u64 },
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("backend process crashed: {0}")]
    BackendCrashed(String),
    #[error("invalid backend spec: {0}")]
    InvalidSpec(String),
}

/// One prediction. Confidence is the model's raw output for the winning
/// label and is deliberately not restricted to [0, 1]: logits pass through
/// unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceOutput {
    pub label: String,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_scores: Option<Vec<f64>>,
}

impl InferenceOutput {
    /// Checks the cross-field invariants: finite confidence, and when raw
    /// scores are present the confidence must equal their maximum.
    pub fn check_consistency(&self) -> Result<(), String> {
        if !self.confidence.is_finite() {
            return Err(format!("confidence {} is not finite", self.confidence));
        }
        if let Some(scores) = &self.raw_scores {
            if scores.is_empty() {
                return Err("raw_scores is present but empty".into());
            }
            if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
                return Err(format!("raw score {bad} is not finite"));
            }
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if self.confidence != max {
                return Err(format!(
                    "confidence {} does not equal max raw score {max}",
                    self.confidence
                ));
            }
        }
        Ok(())
    }
}

/// How to construct a backend. The `kind` field selects the variant in
/// config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    Synthetic {
        n_classes: usize,
        input_len: usize,
        /// Minimum time each call busy-spins before returning.
        #[serde(default)]
        busy_ms: u64,
        /// Weight seed; inherits the run seed when omitted.
        #[serde(default)]
        seed: Option<u64>,
    },
    Subprocess {
        command: String,
        #[serde(default)]
        args: Vec<String>,
        #[serde(default = "default_timeout_ms")]
        timeout_ms: u64,
    },
    Replay {
        path: PathBuf,
    },
}

fn default_timeout_ms() -> u64 {
    10_000
}

impl BackendSpec {
    pub fn validate(&self) -> Result<(), BackendError> {
        match self {
            BackendSpec::Synthetic {
                n_classes,
                input_len,
                ..
            } => {
                if *n_classes == 0 {
                    return Err(BackendError::InvalidSpec("n_classes must be at least 1".into()));
                }
                if *input_len == 0 {
                    return Err(BackendError::InvalidSpec("input_len must be at least 1".into()));
                }
            }
            BackendSpec::Subprocess {
                command,
                timeout_ms,
                ..
            } => {
                if command.is_empty() {
                    return Err(BackendError::InvalidSpec("command must not be empty".into()));
                }
                if *timeout_ms == 0 {
                    return Err(BackendError::InvalidSpec("timeout_ms must be positive".into()));
                }
            }
            BackendSpec::Replay { path } => {
                if path.as_os_str().is_empty() {
                    return Err(BackendError::InvalidSpec("replay path must not be empty".into()));
                }
            }
        }
        Ok(())
    }
}

pub trait Backend {
    /// Human-readable name of the model being served.
    fn model_name(&self) -> &str;

    fn infer(&mut self, input: &InputTensor) -> Result<InferenceOutput, BackendError>;

    /// Releases resources. Idempotent; also runs on drop for process-backed
    /// backends.
    fn close(&mut self);
}

/// Constructs a ready-to-serve backend. `default_seed` fills in a synthetic
/// spec that does not pin its own seed.
pub fn load(spec: &BackendSpec, default_seed: u64) -> Result<Box<dyn Backend>, BackendError> {
    spec.validate()?;
    match spec {
        BackendSpec::Synthetic {
            n_classes,
            input_len,
            busy_ms,
            seed,
        } => Ok(Box::new(SyntheticBackend::new(
            *n_classes,
            *input_len,
            *busy_ms,
            seed.unwrap_or(default_seed),
        ))),
        BackendSpec::Subprocess {
            command,
            args,
            timeout_ms,
        } => Ok(Box::new(SubprocessBackend::spawn(command, args, *timeout_ms)?)),
        BackendSpec::Replay { path } => Ok(Box::new(ReplayBackend::open(path)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_check_accepts_matching_max() {
        let out = InferenceOutput {
            label: "class_1".into(),
            confidence: 17.16,
            raw_scores: Some(vec![0.5, 17.16, -3.0]),
        };
        assert!(out.check_consistency().is_ok());
    }

    #[test]
    fn consistency_check_rejects_mismatch() {
        let out = InferenceOutput {
            label: "a".into(),
            confidence: 0.5,
            raw_scores: Some(vec![0.4, 0.9]),
        };
        assert!(out.check_consistency().is_err());

        let nan = InferenceOutput {
            label: "a".into(),
            confidence: f64::NAN,
            raw_scores: None,
        };
        assert!(nan.check_consistency().is_err());

        let empty = InferenceOutput {
            label: "a".into(),
            confidence: 0.5,
            raw_scores: Some(vec![]),
        };
        assert!(empty.check_consistency().is_err());
    }

    #[test]
    fn spec_validation_catches_bad_params() {
        assert!(BackendSpec::Synthetic {
            n_classes: 0,
            input_len: 4,
            busy_ms: 0,
            seed: None
        }
        .validate()
        .is_err());
        assert!(BackendSpec::Subprocess {
            command: "".into(),
            args: vec![],
            timeout_ms: 100
        }
        .validate()
        .is_err());
        assert!(BackendSpec::Subprocess {
            command: "x".into(),
            args: vec![],
            timeout_ms: 0
        }
        .validate()
        .is_err());
        assert!(BackendSpec::Replay { path: "".into() }.validate().is_err());
    }

    #[test]
    fn spec_toml_uses_kind_tag() {
        let spec: BackendSpec = toml::from_str(
            r#"
kind = "synthetic"
n_classes = 4
input_len = 8
"#,
        )
        .unwrap();
        assert_eq!(
            spec,
            BackendSpec::Synthetic {
                n_classes: 4,
                input_len: 8,
                busy_ms: 0,
                seed: None
            }
        );
    }
}
