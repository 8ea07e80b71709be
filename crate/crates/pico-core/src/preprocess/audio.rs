//! Mono 16-bit PCM WAV decoding.

use super::PreprocessError;

/// Decoded mono audio, samples in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate_hz: u32,
    pub samples: Vec<f32>,
}

impl AudioClip {
    pub fn new(sample_rate_hz: u32, samples: Vec<f32>) -> Result<Self, PreprocessError> {
        if sample_rate_hz == 0 {
            return Err(PreprocessError::InvalidInput(
                "sample rate must be positive".into(),
            ));
        }
        if samples.is_empty() {
            return Err(PreprocessError::InvalidInput("clip has no samples".into()));
        }
        if samples.iter().any(|s| !s.is_finite() || !(-1.0..=1.0).contains(s)) {
            return Err(PreprocessError::InvalidInput(
                "samples must be finite and within [-1, 1]".into(),
            ));
        }
        Ok(Self {
            sample_rate_hz,
            samples,
        })
    }
}

fn malformed(msg: impl Into<String>) -> PreprocessError {
    PreprocessError::MalformedHeader(msg.into())
}

fn u16_at(bytes: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([bytes[off], bytes[off + 1]])
}

fn u32_at(bytes: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]])
}

/// Decodes a RIFF/WAVE byte stream holding uncompressed mono 16-bit PCM.
/// Sample values are scaled by 1/32768 into [-1, 1).
pub fn decode_wav_pcm16(bytes: &[u8]) -> Result<AudioClip, PreprocessError> {
    if bytes.len() < 12 {
        return Err(malformed("shorter than a RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(malformed("missing RIFF tag"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing WAVE form type"));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    let mut off = 12;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32_at(bytes, off + 4) as usize;
        let body_start = off + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| malformed("chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(malformed(format!(
                "chunk {:?} of {size} bytes is truncated",
                String::from_utf8_lossy(id)
            )));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed("fmt chunk shorter than 16 bytes"));
                }
                fmt = Some((
                    u16_at(body, 0),  // audio format
                    u16_at(body, 2),  // channels
                    u32_at(body, 4),  // sample rate
                    u16_at(body, 14), // bits per sample
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunk bodies are word-aligned; odd sizes carry a pad byte
        off = body_end + (size & 1);
    }

    let (format, channels, sample_rate, bits) =
        fmt.ok_or_else(|| malformed("missing fmt chunk"))?;
    if format != 1 {
        return Err(PreprocessError::UnsupportedFormat(format!(
            "audio format tag {format}, only PCM (1) is supported"
        )));
    }
    if channels != 1 {
        return Err(PreprocessError::UnsupportedFormat(format!(
            "{channels} channels, only mono is supported"
        )));
    }
    if bits != 16 {
        return Err(PreprocessError::UnsupportedFormat(format!(
            "{bits}-bit samples, only 16-bit is supported"
        )));
    }

    let data = data.ok_or_else(|| malformed("missing data chunk"))?;
    if data.is_empty() {
        return Err(malformed("data chunk is empty"));
    }
    if data.len() % 2 != 0 {
        return Err(malformed("data chunk splits a 16-bit sample"));
    }
    let samples = data
        .chunks_exact(2)
        .map(|pair| i16::from_le_bytes([pair[0], pair[1]]) as f32 / 32768.0)
        .collect();
    AudioClip::new(sample_rate, samples)
}

/// Encodes mono 16-bit PCM into a minimal RIFF/WAVE byte stream; the exact
/// inverse of [`decode_wav_pcm16`]. Useful for fixtures and for dumping
/// clips.
pub fn encode_wav_pcm16(sample_rate_hz: u32, samples: &[i16]) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}
