//! The network half of the decoder: an MLP mapping normalized syndromes to
//! per-bit error marginals, its training loop, and model persistence.

mod mlp;
mod model_file;
mod schedule;
mod train;

pub use mlp::{batch_bce, bce_loss, Gradients, Layer, Mlp, EPS};
pub use model_file::{MlpDecoderNet, MODEL_MAGIC, MODEL_VERSION};
pub use schedule::{LrSchedule, DEFAULT_INITIAL_LR};
pub use train::{train, LogRow, MlpConfig, Sgd, TrainingReport};

use thiserror::Error;

use crate::noise::NoiseError;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("expected width {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid layer widths {0:?}")]
    Architecture(Vec<usize>),
    #[error("layer {layer} does not chain onto the previous layer")]
    DimensionChain { layer: usize },
    #[error("non-finite gradient in layer {layer}")]
    NonFinite { layer: usize },
    #[error("invalid hyperparameter: {0}")]
    Config(String),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
    #[error("model file is truncated")]
    Truncated,
    #[error("model file has {0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("invalid model metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Io(std::io::Error),
}

impl From<std::io::Error> for NnError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            NnError::Truncated
        } else {
            NnError::Io(e)
        }
    }
}

/// Floating-point element type of a network: `f32` for training and
/// decoding, `f64` for gradient checks.
pub trait Real:
    num_traits::Float
    + ndarray::LinalgScalar
    + ndarray::ScalarOperand
    + std::fmt::Debug
    + std::ops::AddAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }
}
