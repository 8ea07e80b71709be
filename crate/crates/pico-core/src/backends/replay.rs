//! Replays a recorded trace of inference outputs.
//!
//! The trace is a JSON-lines file, one `InferenceOutput` per line:
//!
//! ```text
//! {"label":"yes","confidence":0.99,"raw_scores":[0.01,0.99]}
//! {"label":"no","confidence":0.97}
//! ```
//!
//! Outputs are served in file order and wrap around at the end, so a trace
//! shorter than the iteration count still serves every call.

use std::fs;
use std::path::Path;

use crate::preprocess::InputTensor;

use super::{Backend, BackendError, InferenceOutput};

#[derive(Debug)]
pub struct ReplayBackend {
    outputs: Vec<InferenceOutput>,
    next: usize,
}

impl ReplayBackend {
    pub fn open(path: &Path) -> Result<Self, BackendError> {
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                BackendError::ReplayFileMissing {
                    path: path.to_path_buf(),
                }
            } else {
                BackendError::ReplayParse(format!("{}: {e}", path.display()))
            }
        })?;
        let mut outputs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let out: InferenceOutput = serde_json::from_str(line).map_err(|e| {
                BackendError::ReplayParse(format!("line {}: {e}", lineno + 1))
            })?;
            out.check_consistency().map_err(|e| {
                BackendError::ReplayParse(format!("line {}: {e}", lineno + 1))
            })?;
            outputs.push(out);
        }
        if outputs.is_empty() {
            return Err(BackendError::ReplayParse("trace holds no outputs".into()));
        }
        Ok(Self { outputs, next: 0 })
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

impl Backend for ReplayBackend {
    fn model_name(&self) -> &str {
        "replay-trace"
    }

    fn infer(&mut self, _input: &InputTensor) -> Result<InferenceOutput, BackendError> {
        let out = self.outputs[self.next].clone();
        self.next = (self.next + 1) % self.outputs.len();
        Ok(out)
    }

    fn close(&mut self) {}
}
