//! Image tensor resizing and normalization.

use super::PreprocessError;

/// Dense row-major image data, `height * width * channels` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, PreprocessError> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(PreprocessError::InvalidInput(format!(
                "image dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        let expected = height
            .checked_mul(width)
            .and_then(|hw| hw.checked_mul(channels))
            .ok_or_else(|| PreprocessError::InvalidInput("image dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(PreprocessError::InvalidInput(format!(
                "image data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(PreprocessError::InvalidInput(format!(
                "image contains non-finite value {v}"
            )));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }
}

/// Bilinear resize with half-pixel-center coordinate mapping: the source
/// position of output pixel `d` along an axis is `(d + 0.5) * in/out - 0.5`,
/// clamped to the valid range. Each output value is additionally clamped to
/// the min/max of its four source corners, so output values never leave the
/// input value range and constant images are preserved exactly.
pub fn resize_bilinear(
    img: &ImageTensor,
    out_h: usize,
    out_w: usize,
) -> Result<ImageTensor, PreprocessError> {
    if out_h == 0 || out_w == 0 {
        return Err(PreprocessError::InvalidInput(
            "resize target dimensions must be positive".into(),
        ));
    }
    let (in_h, in_w, ch) = (img.height, img.width, img.channels);
    let scale_y = in_h as f64 / out_h as f64;
    let scale_x = in_w as f64 / out_w as f64;

    let mut out = Vec::with_capacity(out_h * out_w * ch);
    for oy in 0..out_h {
        let sy = ((oy as f64 + 0.5) * scale_y - 0.5).clamp(0.0, (in_h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(in_h - 1);
        let fy = sy - y0 as f64;
        for ox in 0..out_w {
            let sx = ((ox as f64 + 0.5) * scale_x - 0.5).clamp(0.0, (in_w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(in_w - 1);
            let fx = sx - x0 as f64;
            for c in 0..ch {
                let p00 = img.at(y0, x0, c);
                let p01 = img.at(y0, x1, c);
                let p10 = img.at(y1, x0, c);
                let p11 = img.at(y1, x1, c);
                let top = p00 + fx * (p01 - p00);
                let bottom = p10 + fx * (p11 - p10);
                let v = top + fy * (bottom - top);
                let lo = p00.min(p01).min(p10).min(p11);
                let hi = p00.max(p01).max(p10).max(p11);
                out.push(v.clamp(lo, hi));
            }
        }
    }
    ImageTensor::new(out_h, out_w, ch, out)
}

/// Per-channel standardization: `v' = (v - mean[c]) / std[c]`.
pub fn normalize(
    img: &ImageTensor,
    mean: &[f64],
    std: &[f64],
) -> Result<ImageTensor, PreprocessError> {
    if mean.len() != img.channels || std.len() != img.channels {
        return Err(PreprocessError::InvalidInput(format!(
            "expected {} per-channel values, got mean[{}] std[{}]",
            img.channels,
            mean.len(),
            std.len()
        )));
    }
    if let Some(channel) = std.iter().position(|&s| s == 0.0) {
        return Err(PreprocessError::ZeroStd { channel });
    }
    let ch = img.channels;
    let data = img
        .data
        .iter()
        .enumerate()
        .map(|(i, v)| (v - mean[i % ch]) / std[i % ch])
        .collect();
    ImageTensor::new(img.height, img.width, img.channels, data)
}
