//! Drives an external model runner over newline-delimited JSON.
//!
//! Protocol, one JSON object per line on the child's stdin/stdout:
//!
//! ```text
//! parent -> {"type":"hello","version":1}
//! child  -> {"type":"ready","model":"<name>"}
//! parent -> {"type":"infer","id":1,"shape":[1,8],"dtype":"f32","data":"<base64 LE>"}
//! child  -> {"type":"result","id":1,"label":"yes","confidence":0.99,"raw_scores":[...]}
//! ```
//!
//! Request ids increase strictly; a response must carry the id of the
//! request it answers. Closing the child's stdin asks it to exit; a child
//! still alive two seconds later is killed. The child's stderr is inherited
//! so runner diagnostics land in the harness's own stderr.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use base64::Engine;
use base64::engine::general_purpose::STANDARD as BASE64;
use serde::Deserialize;
use serde_json::json;

use crate::preprocess::{InputTensor, TensorData};

use super::{Backend, BackendError, InferenceOutput};

const PROTOCOL_VERSION: u32 = 1;
const SHUTDOWN_GRACE: Duration = Duration::from_secs(2);

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ChildMessage {
    Ready {
        model: String,
    },
    Result {
        id: u64,
        label: String,
        confidence: f64,
        #[serde(default)]
        raw_scores: Option<Vec<f64>>,
    },
}

#[derive(Debug)]
pub struct SubprocessBackend {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    reader: Option<JoinHandle<()>>,
    timeout: Duration,
    timeout_ms: u64,
    next_id: u64,
    model: String,
    closed: bool,
}

impl SubprocessBackend {
    pub fn spawn(command: &str, args: &[String], timeout_ms: u64) -> Result<Self, BackendError> {
        let mut child = Command::new(command)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| BackendError::SpawnFailure {
                command: command.to_string(),
                source,
            })?;

        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, lines) = std::sync::mpsc::channel();
        let reader = std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let failed = line.is_err();
                if tx.send(line).is_err() || failed {
                    break;
                }
            }
        });

        let mut backend = Self {
            child,
            stdin: Some(stdin),
            lines,
            reader: Some(reader),
            timeout: Duration::from_millis(timeout_ms),
            timeout_ms,
            next_id: 0,
            model: String::new(),
            closed: false,
        };

        match backend.handshake() {
            Ok(model) => {
                backend.model = model;
                Ok(backend)
            }
            Err(e) => {
                backend.close();
                Err(e)
            }
        }
    }

    fn handshake(&mut self) -> Result<String, BackendError> {
        self.send_line(&json!({"type": "hello", "version": PROTOCOL_VERSION}).to_string())?;
        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(BackendError::BackendCrashed(format!("stdout error: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(BackendError::HandshakeTimeout {
                    timeout_ms: self.timeout_ms,
                })
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(self.crashed("exited before replying to the handshake"))
            }
        };
        match serde_json::from_str(&line) {
            Ok(ChildMessage::Ready { model }) => Ok(model),
            Ok(_) => Err(BackendError::ProtocolError(
                "expected a ready message after hello".into(),
            )),
            Err(e) => Err(BackendError::ProtocolError(format!(
                "unparsable handshake reply: {e}"
            ))),
        }
    }

    fn send_line(&mut self, line: &str) -> Result<(), BackendError> {
        let Some(stdin) = self.stdin.as_mut() else {
            return Err(BackendError::BackendCrashed("backend already closed".into()));
        };
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.write_all(b"\n"))
            .and_then(|_| stdin.flush())
            .map_err(|e| BackendError::BackendCrashed(format!("stdin write failed: {e}")))
    }

    /// An EOF or EPIPE means the child is dead or dying; its exit status
    /// can lag the pipe closing by a moment, so poll briefly rather than
    /// reporting "no status" on a race.
    fn crashed(&mut self, context: &str) -> BackendError {
        let deadline = Instant::now() + Duration::from_secs(1);
        let status = loop {
            match self.child.try_wait() {
                Ok(Some(status)) => break format!(" ({status})"),
                Ok(None) if Instant::now() < deadline => {
                    thread::sleep(Duration::from_millis(5));
                }
                _ => break String::new(),
            }
        };
        BackendError::BackendCrashed(format!("{context}{status}"))
    }

    /// Little-endian wire encoding. i16 tensors are promoted to f32, which
    /// is lossless, because the wire only speaks f32 and u8.
    fn encode_payload(input: &InputTensor) -> (&'static str, Vec<u8>) {
        match &input.data {
            TensorData::F32(v) => (
                "f32",
                v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            ),
            TensorData::U8(v) => ("u8", v.clone()),
            TensorData::I16(v) => (
                "f32",
                v.iter().flat_map(|x| (*x as f32).to_le_bytes()).collect(),
            ),
        }
    }
}

impl Backend for SubprocessBackend {
    fn model_name(&self) -> &str {
        &self.model
    }

    fn infer(&mut self, input: &InputTensor) -> Result<InferenceOutput, BackendError> {
        if self.closed {
            return Err(BackendError::BackendCrashed("backend already closed".into()));
        }
        self.next_id += 1;
        let id = self.next_id;
        let (dtype, bytes) = Self::encode_payload(input);
        let request = json!({
            "type": "infer",
            "id": id,
            "shape": input.shape,
            "dtype": dtype,
            "data": BASE64.encode(bytes),
        });
        self.send_line(&request.to_string())?;

        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(BackendError::BackendCrashed(format!("stdout error: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                // a late reply would desynchronize ids, so the child is
                // unusable from here on
                self.close();
                return Err(BackendError::BackendTimeout {
                    timeout_ms: self.timeout_ms,
                });
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(self.crashed("exited mid-inference"))
            }
        };

        let msg: ChildMessage = serde_json::from_str(&line)
            .map_err(|e| BackendError::ProtocolError(format!("unparsable response: {e}")))?;
        match msg {
            ChildMessage::Result {
                id: got,
                label,
                confidence,
                raw_scores,
            } => {
                if got != id {
                    return Err(BackendError::ProtocolError(format!(
                        "response id {got} does not match request id {id}"
                    )));
                }
                let out = InferenceOutput {
                    label,
                    confidence,
                    raw_scores,
                };
                out.check_consistency()
                    .map_err(BackendError::ProtocolError)?;
                Ok(out)
            }
            ChildMessage::Ready { .. } => Err(BackendError::ProtocolError(
                "unexpected ready message during inference".into(),
            )),
        }
    }

    fn close(&mut self) {
        if self.closed {
            return;
        }
        self.closed = true;

        // dropping stdin closes the pipe, which asks the child to exit
        self.stdin = None;
        let deadline = Instant::now() + SHUTDOWN_GRACE;
        let exited = loop {
            match self.child.try_wait() {
                Ok(Some(_)) => break true,
                Ok(None) if Instant::now() < deadline => {
                    std::thread::sleep(Duration::from_millis(10))
                }
                _ => break false,
            }
        };
        if !exited {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
        if let Some(reader) = self.reader.take() {
            let _ = reader.join();
        }
    }
}

impl Drop for SubprocessBackend {
    fn drop(&mut self) {
        self.close();
    }
}
