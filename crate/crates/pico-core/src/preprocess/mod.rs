//! Input preparation: image resize/normalize, audio decode, log-power
//! spectrograms, quantization, and the raw tensor container.
//!
//! Everything here is pure and deterministic: identical inputs produce
//! bit-identical outputs on the same platform.

pub mod audio;
pub mod image;
pub mod spectrum;
pub mod tensor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use audio::{decode_wav_pcm16, encode_wav_pcm16, AudioClip};
pub use image::{normalize, resize_bilinear, ImageTensor};
pub use spectrum::{
    fft, hann_window, ifft, stft_log_power, stft_log_power_with_floor, Spectrogram,
    DEFAULT_FRAME_LEN, DEFAULT_HOP_LEN, DEFAULT_LOG_FLOOR,
};
pub use tensor::{parse_pten, quantize, write_pten, Dtype, InputTensor, Quantization, TensorData};

#[derive(Debug, Error)]
pub enum PreprocessError {
    /// A constructor invariant was violated (dimension/length mismatch,
    /// non-finite or out-of-range values).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("normalization std is zero for channel {channel}")]
    ZeroStd { channel: usize },
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("hop length must be at least 1")]
    ZeroHop,
    #[error("clip of {len} samples is shorter than one frame of {frame_len}")]
    ClipTooShort { len: usize, frame_len: usize },
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed audio header: {0}")]
    MalformedHeader(String),
    #[error("quantization scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("tensor carries no quantization parameters")]
    MissingQuantization,
    #[error("malformed tensor container: {0}")]
    MalformedTensor(String),
}

/// Per-sample-type preprocessing settings. The config file sets run-wide
/// defaults; a manifest entry may patch individual fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessParams {
    pub image: ImageParams,
    pub audio: AudioParams,
    pub tensor: TensorParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImageParams {
    /// Target (height, width); omitted means keep source dimensions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resize: Option<(usize, usize)>,
    /// Per-channel normalization; both or neither must be present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantize: Option<Quantization>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AudioParams {
    pub frame_len: usize,
    pub hop_len: usize,
    pub log_floor: f64,
}

impl Default for AudioParams {
    fn default() -> Self {
        Self {
            frame_len: DEFAULT_FRAME_LEN,
            hop_len: DEFAULT_HOP_LEN,
            log_floor: DEFAULT_LOG_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TensorParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantize: Option<Quantization>,
}

/// Partial override attached to a single manifest entry. Present fields
/// replace the run-wide value; the patch only makes sense for the entry's
/// own sample type and other sections are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessPatch {
    pub resize: Option<(usize, usize)>,
    pub mean: Option<Vec<f64>>,
    pub std: Option<Vec<f64>>,
    pub quantize: Option<Quantization>,
    pub frame_len: Option<usize>,
    pub hop_len: Option<usize>,
    pub log_floor: Option<f64>,
}

impl PreprocessPatch {
    pub fn apply_image(&self, base: &ImageParams) -> ImageParams {
        ImageParams {
            resize: self.resize.or(base.resize),
            mean: self.mean.clone().or_else(|| base.mean.clone()),
            std: self.std.clone().or_else(|| base.std.clone()),
            quantize: self.quantize.clone().or_else(|| base.quantize.clone()),
        }
    }

    pub fn apply_audio(&self, base: &AudioParams) -> AudioParams {
        AudioParams {
            frame_len: self.frame_len.unwrap_or(base.frame_len),
            hop_len: self.hop_len.unwrap_or(base.hop_len),
            log_floor: self.log_floor.unwrap_or(base.log_floor),
        }
    }

    pub fn apply_tensor(&self, base: &TensorParams) -> TensorParams {
        TensorParams {
            quantize: self.quantize.clone().or_else(|| base.quantize.clone()),
        }
    }
}
