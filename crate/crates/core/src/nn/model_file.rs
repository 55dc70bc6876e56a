//! Binary model files, little-endian throughout:
//!
//! ```text
//! magic    "NNDEC1\0"
//! u32      version (1)
//! u32      layer count
//! u32,u32  (in, out) per layer
//! per layer: f32 weights, row-major out × in, then f32 biases
//! f64      syndrome mean, f64 syndrome variance
//! f64      fidelity
//! u32      mode (0 joint, 1 z-only)
//! u64      toric lattice side (0 if not toric)
//! u64      training samples seen
//! ```

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use super::{Layer, Mlp, NnError};
use crate::code::{DecodeMode, Syndrome};
use crate::noise::{flip_rate, normalize_syndrome, NoiseStats};

pub const MODEL_MAGIC: &[u8; 7] = b"NNDEC1\0";
pub const MODEL_VERSION: u32 = 1;

const MAX_LAYERS: u32 = 4096;

/// A trained network plus everything needed to feed it syndromes.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpDecoderNet {
    pub net: Mlp<f32>,
    pub stats: NoiseStats,
    pub fidelity: f64,
    pub mode: DecodeMode,
    /// Toric lattice side the net was trained on, `0` for other codes.
    pub lattice: u64,
    pub samples_seen: u64,
}

impl MlpDecoderNet {
    /// Error marginals for a (mode-restricted) syndrome.
    pub fn marginals(&self, syndrome: &Syndrome) -> Result<Vec<f32>, NnError> {
        let x = normalize_syndrome(syndrome, &self.stats)?;
        self.net.forward(&x)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 4 * self.net.n_params());
        out.extend_from_slice(MODEL_MAGIC);
        // writes into a Vec cannot fail
        let w = &mut out;
        w.write_u32::<LittleEndian>(MODEL_VERSION).unwrap();
        let layers = self.net.layers();
        w.write_u32::<LittleEndian>(layers.len() as u32).unwrap();
        for layer in layers {
            w.write_u32::<LittleEndian>(layer.inputs() as u32).unwrap();
            w.write_u32::<LittleEndian>(layer.outputs() as u32).unwrap();
        }
        for layer in layers {
            for &v in layer.weights.iter() {
                w.write_f32::<LittleEndian>(v).unwrap();
            }
            for &v in layer.bias.iter() {
                w.write_f32::<LittleEndian>(v).unwrap();
            }
        }
        w.write_f64::<LittleEndian>(self.stats.mean).unwrap();
        w.write_f64::<LittleEndian>(self.stats.variance).unwrap();
        w.write_f64::<LittleEndian>(self.fidelity).unwrap();
        let mode = match self.mode {
            DecodeMode::Joint => 0,
            DecodeMode::ZOnly => 1,
        };
        w.write_u32::<LittleEndian>(mode).unwrap();
        w.write_u64::<LittleEndian>(self.lattice).unwrap();
        w.write_u64::<LittleEndian>(self.samples_seen).unwrap();
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NnError> {
        let mut r = Cursor::new(bytes);
        let mut magic = [0u8; 7];
        r.read_exact(&mut magic).map_err(|_| NnError::BadMagic)?;
        if &magic != MODEL_MAGIC {
            return Err(NnError::BadMagic);
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != MODEL_VERSION {
            return Err(NnError::UnsupportedVersion(version));
        }
        let count = r.read_u32::<LittleEndian>()?;
        if count == 0 || count > MAX_LAYERS {
            return Err(NnError::Metadata(format!("layer count {count}")));
        }
        let mut shapes = Vec::with_capacity(count as usize);
        let mut floats = 0u64;
        for layer in 0..count as usize {
            let inputs = r.read_u32::<LittleEndian>()? as usize;
            let outputs = r.read_u32::<LittleEndian>()? as usize;
            if inputs == 0 || outputs == 0 {
                return Err(NnError::DimensionChain { layer });
            }
            if let Some(&(_, prev_out)) = shapes.last() {
                if prev_out != inputs {
                    return Err(NnError::DimensionChain { layer });
                }
            }
            floats += (inputs as u64 + 1) * outputs as u64;
            shapes.push((inputs, outputs));
        }
        let remaining = (bytes.len() as u64).saturating_sub(r.position());
        if floats.saturating_mul(4) > remaining {
            return Err(NnError::Truncated);
        }
        let mut layers = Vec::with_capacity(shapes.len());
        for &(inputs, outputs) in &shapes {
            let mut weights = vec![0f32; inputs * outputs];
            r.read_f32_into::<LittleEndian>(&mut weights)?;
            let mut bias = vec![0f32; outputs];
            r.read_f32_into::<LittleEndian>(&mut bias)?;
            layers.push(Layer {
                weights: Array2::from_shape_vec((outputs, inputs), weights)
                    .expect("length matches shape"),
                bias: Array1::from(bias),
            });
        }
        let mean = r.read_f64::<LittleEndian>()?;
        let variance = r.read_f64::<LittleEndian>()?;
        let fidelity = r.read_f64::<LittleEndian>()?;
        let mode = match r.read_u32::<LittleEndian>()? {
            0 => DecodeMode::Joint,
            1 => DecodeMode::ZOnly,
            other => return Err(NnError::Metadata(format!("mode {other}"))),
        };
        let lattice = r.read_u64::<LittleEndian>()?;
        let samples_seen = r.read_u64::<LittleEndian>()?;
        let trailing = bytes.len() - r.position() as usize;
        if trailing != 0 {
            return Err(NnError::TrailingBytes(trailing));
        }
        let q = flip_rate(fidelity).map_err(|_| NnError::Metadata(format!("fidelity {fidelity}")))?;
        if !(0.0..=1.0).contains(&mean) || !(0.0..=0.25).contains(&variance) {
            return Err(NnError::Metadata(format!(
                "syndrome statistics mean={mean} variance={variance}"
            )));
        }
        Ok(MlpDecoderNet {
            net: Mlp::from_layers(layers)?,
            stats: NoiseStats { q, mean, variance },
            fidelity,
            mode,
            lattice,
            samples_seen,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NnError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NnError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
