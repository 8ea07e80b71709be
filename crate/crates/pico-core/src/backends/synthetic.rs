//! Deterministic linear scorer used as a hermetic stand-in for a real
//! model.
//!
//! Weights and bias are drawn once at load from a 64-bit linear
//! congruential generator with Knuth's MMIX constants:
//!
//! ```text
//! state' = state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! ```
//!
//! Each draw advances the state once and maps the top 53 bits to a uniform
//! f64 in [0, 1); weights use `2u - 1` in [-1, 1). Draw order is the weight
//! matrix row by row (class-major), then the bias vector. Scoring is
//! `scores = W x + bias` accumulated in index order, so identical (seed,
//! input) pairs produce bit-identical scores on any IEEE-754 double
//! implementation.

use std::time::{Duration, Instant};

use crate::preprocess::InputTensor;

use super::{Backend, BackendError, InferenceOutput};

const LCG_MUL: u64 = 6364136223846793005;
const LCG_INC: u64 = 1442695040888963407;

struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub struct SyntheticBackend {
    n_classes: usize,
    input_len: usize,
    busy_ms: u64,
    /// Row-major `n_classes * input_len`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl SyntheticBackend {
    pub fn new(n_classes: usize, input_len: usize, busy_ms: u64, seed: u64) -> Self {
        let mut rng = Lcg(seed);
        let weights = (0..n_classes * input_len)
            .map(|_| 2.0 * rng.next_f64() - 1.0)
            .collect();
        let bias = (0..n_classes).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        Self {
            n_classes,
            input_len,
            busy_ms,
            weights,
            bias,
        }
    }

    /// Bypasses the PRNG and installs explicit parameters.
    pub fn with_parameters(weights: Vec<f64>, bias: Vec<f64>, busy_ms: u64) -> Self {
        let n_classes = bias.len();
        assert!(n_classes > 0 && weights.len() % n_classes == 0);
        let input_len = weights.len() / n_classes;
        Self {
            n_classes,
            input_len,
            busy_ms,
            weights,
            bias,
        }
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let row = &self.weights[c * self.input_len..(c + 1) * self.input_len];
                let mut acc = 0.0;
                for (w, v) in row.iter().zip(x.iter()) {
                    acc += w * v;
                }
                acc + self.bias[c]
            })
            .collect()
    }
}

impl Backend for SyntheticBackend {
    fn model_name(&self) -> &str {
        "synthetic-linear"
    }

    fn infer(&mut self, input: &InputTensor) -> Result<InferenceOutput, BackendError> {
        if input.len() != self.input_len {
            return Err(BackendError::ShapeMismatch {
                expected: self.input_len,
                got: input.len(),
            });
        }
        let scores = self.scores(&input.data.to_f64());

        if self.busy_ms > 0 {
            // spin rather than sleep so CPU measurements see genuine load
            let deadline = Instant::now() + Duration::from_millis(self.busy_ms);
            while Instant::now() < deadline {
                std::hint::spin_loop();
            }
        }

        let mut argmax = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[argmax] {
                argmax = i;
            }
        }
        Ok(InferenceOutput {
            label: format!("class_{argmax}"),
            confidence: scores[argmax],
            raw_scores: Some(scores),
        })
    }

    fn close(&mut self) {}
}
