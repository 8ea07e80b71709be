//! Flat input tensors, affine quantization, and the raw on-disk container.

use serde::{Deserialize, Serialize};

use super::PreprocessError;

/// Element type carried by an [`InputTensor`] and the on-disk container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    U8,
    I16,
}

impl Dtype {
    pub fn code(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::U8 => 1,
            Dtype::I16 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Dtype::F32),
            1 => Some(Dtype::U8),
            2 => Some(Dtype::I16),
            _ => None,
        }
    }

    pub fn elem_size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::U8 => 1,
            Dtype::I16 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    U8(Vec<u8>),
    I16(Vec<i16>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::U8(v) => v.len(),
            TensorData::I16(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::F32(_) => Dtype::F32,
            TensorData::U8(_) => Dtype::U8,
            TensorData::I16(_) => Dtype::I16,
        }
    }

    /// Elementwise view as f64 (for quantization and scoring).
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::U8(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::I16(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }
}

/// Affine quantization parameters: `real = (q - zero_point) * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantization {
    pub scale: f64,
    pub zero_point: i64,
}

/// Uniform payload handed to backends: a shape plus flat data.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    pub shape: Vec<usize>,
    pub data: TensorData,
    pub quantization: Option<Quantization>,
}

impl InputTensor {
    pub fn new(
        shape: Vec<usize>,
        data: TensorData,
        quantization: Option<Quantization>,
    ) -> Result<Self, PreprocessError> {
        let expected = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| PreprocessError::InvalidInput("tensor shape overflows".into()))?;
        if data.len() != expected {
            return Err(PreprocessError::InvalidInput(format!(
                "tensor data length {} does not match shape {:?} ({expected} elements)",
                data.len(),
                shape
            )));
        }
        Ok(Self {
            shape,
            data,
            quantization,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Maps each element to `clamp(round(v / scale) + zero_point, 0, 255)` with
/// halves rounding away from zero, producing a u8 tensor that keeps the
/// quantization parameters for later dequantization.
pub fn quantize(t: &InputTensor) -> Result<InputTensor, PreprocessError> {
    let q = t
        .quantization
        .as_ref()
        .ok_or(PreprocessError::MissingQuantization)?;
    if !(q.scale > 0.0 && q.scale.is_finite()) {
        return Err(PreprocessError::NonPositiveScale(q.scale));
    }
    let data: Vec<u8> = t
        .data
        .to_f64()
        .iter()
        .map(|v| ((v / q.scale).round() + q.zero_point as f64).clamp(0.0, 255.0) as u8)
        .collect();
    InputTensor::new(t.shape.clone(), TensorData::U8(data), t.quantization.clone())
}

const PTEN_MAGIC: &[u8; 4] = b"PTEN";
const PTEN_VERSION: u16 = 1;

fn bad(msg: impl Into<String>) -> PreprocessError {
    PreprocessError::MalformedTensor(msg.into())
}

/// Parses the raw tensor container: little-endian header
/// `{magic "PTEN", version u16, dtype u8, ndim u8, dims u32 x ndim}`
/// followed by packed little-endian element data, sized exactly.
pub fn parse_pten(bytes: &[u8]) -> Result<InputTensor, PreprocessError> {
    if bytes.len() < 8 {
        return Err(bad("shorter than the fixed header"));
    }
    if &bytes[0..4] != PTEN_MAGIC {
        return Err(bad("missing PTEN magic"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != PTEN_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dtype = Dtype::from_code(bytes[6]).ok_or_else(|| bad(format!("unknown dtype code {}", bytes[6])))?;
    let ndim = bytes[7] as usize;

    let dims_end = 8 + ndim * 4;
    if bytes.len() < dims_end {
        return Err(bad("truncated dimension list"));
    }
    let shape: Vec<usize> = (0..ndim)
        .map(|i| {
            let off = 8 + i * 4;
            u32::from_le_bytes([bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]])
                as usize
        })
        .collect();
    let count = shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| bad("dimension product overflows"))?;

    let payload = &bytes[dims_end..];
    let expected = count
        .checked_mul(dtype.elem_size())
        .ok_or_else(|| bad("payload size overflows"))?;
    if payload.len() != expected {
        return Err(bad(format!(
            "payload is {} bytes, expected {expected} for {count} elements",
            payload.len()
        )));
    }

    let data = match dtype {
        Dtype::F32 => TensorData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ),
        Dtype::U8 => TensorData::U8(payload.to_vec()),
        Dtype::I16 => TensorData::I16(
            payload
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
    };
    InputTensor::new(shape, data, None)
}

/// Serializes a tensor into the raw container format; inverse of
/// [`parse_pten`] up to the quantization field, which the container does
/// not carry.
pub fn write_pten(t: &InputTensor) -> Result<Vec<u8>, PreprocessError> {
    if t.shape.len() > u8::MAX as usize {
        return Err(bad(format!("{} dimensions exceed the header limit", t.shape.len())));
    }
    for &d in &t.shape {
        if d > u32::MAX as usize {
            return Err(bad(format!("dimension {d} exceeds u32")));
        }
    }
    let mut out = Vec::with_capacity(8 + t.shape.len() * 4 + t.len() * t.data.dtype().elem_size());
    out.extend_from_slice(PTEN_MAGIC);
    out.extend_from_slice(&PTEN_VERSION.to_le_bytes());
    out.push(t.data.dtype().code());
    out.push(t.shape.len() as u8);
    for &d in &t.shape {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    match &t.data {
        TensorData::F32(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        TensorData::U8(v) => out.extend_from_slice(v),
        TensorData::I16(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    Ok(out)
}
