//! Radix-2 FFT and log-power spectrograms.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{AudioClip, PreprocessError};

pub const DEFAULT_FRAME_LEN: usize = 512;
pub const DEFAULT_HOP_LEN: usize = 256;
/// Power floor applied before the log so silence maps to a finite value.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-10;

/// Time-frequency matrix of per-frame log power, row-major
/// `n_frames * n_bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub n_frames: usize,
    pub n_bins: usize,
    pub values: Vec<f64>,
    pub frame_len: usize,
    pub hop_len: usize,
}

impl Spectrogram {
    #[inline]
    pub fn at(&self, frame: usize, bin: usize) -> f64 {
        self.values[frame * self.n_bins + bin]
    }
}

/// Discrete Fourier transform, `X[j] = sum_t x[t] * exp(-2*pi*i*j*t/n)`,
/// computed by iterative radix-2 decimation in time. The length must be a
/// power of two (1 is allowed).
pub fn fft(x: &[Complex64]) -> Result<Vec<Complex64>, PreprocessError> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(PreprocessError::NotPowerOfTwo { len: n });
    }
    let mut a = x.to_vec();

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let angle = -2.0 * PI / len as f64;
        let w_len = Complex64::new(angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
    Ok(a)
}

/// Inverse transform via the conjugation identity
/// `ifft(X) = conj(fft(conj(X))) / n`.
pub fn ifft(x: &[Complex64]) -> Result<Vec<Complex64>, PreprocessError> {
    let n = x.len();
    let conj: Vec<Complex64> = x.iter().map(|c| c.conj()).collect();
    let mut out = fft(&conj)?;
    let scale = 1.0 / n as f64;
    for c in &mut out {
        *c = c.conj() * scale;
    }
    Ok(out)
}

/// Symmetric Hann window `w[t] = 0.5 * (1 - cos(2*pi*t/(n-1)))`; a
/// single-sample window is `[1.0]`.
pub fn hann_window(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|t| 0.5 * (1.0 - (2.0 * PI * t as f64 / (n - 1) as f64).cos()))
        .collect()
}

pub fn stft_log_power(
    clip: &AudioClip,
    frame_len: usize,
    hop_len: usize,
) -> Result<Spectrogram, PreprocessError> {
    stft_log_power_with_floor(clip, frame_len, hop_len, DEFAULT_LOG_FLOOR)
}

/// Short-time Fourier transform to log power: frames of `frame_len` samples
/// every `hop_len` samples, Hann-windowed, transformed, and reduced to
/// `log10(max(|X[b]|^2, floor))` over the `frame_len/2 + 1` non-redundant
/// bins. Frame count is `1 + (len - frame_len) / hop_len`.
pub fn stft_log_power_with_floor(
    clip: &AudioClip,
    frame_len: usize,
    hop_len: usize,
    floor: f64,
) -> Result<Spectrogram, PreprocessError> {
    if !frame_len.is_power_of_two() {
        return Err(PreprocessError::NotPowerOfTwo { len: frame_len });
    }
    if hop_len == 0 {
        return Err(PreprocessError::ZeroHop);
    }
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(PreprocessError::InvalidInput(format!(
            "log floor must be positive and finite, got {floor}"
        )));
    }
    let len = clip.samples.len();
    if len < frame_len {
        return Err(PreprocessError::ClipTooShort { len, frame_len });
    }

    let n_frames = 1 + (len - frame_len) / hop_len;
    let n_bins = frame_len / 2 + 1;
    let window = hann_window(frame_len);

    let mut values = Vec::with_capacity(n_frames * n_bins);
    let mut frame = vec![Complex64::new(0.0, 0.0); frame_len];
    for f in 0..n_frames {
        let start = f * hop_len;
        for (t, slot) in frame.iter_mut().enumerate() {
            *slot = Complex64::new(clip.samples[start + t] as f64 * window[t], 0.0);
        }
        let spectrum = fft(&frame)?;
        values.extend(
            spectrum[..n_bins]
                .iter()
                .map(|c| c.norm_sqr().max(floor).log10()),
        );
    }

    Ok(Spectrogram {
        n_frames,
        n_bins,
        values,
        frame_len,
        hop_len,
    })
}
