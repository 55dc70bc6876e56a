//! Experiment driver behind the `syndromic` command line: training,
//! evaluation, decoder comparison and parameter sweeps, all writing CSV.

mod commands;
mod config;
mod eval;
mod record;

pub use commands::{
    cmd_compare, cmd_evaluate, cmd_sweep, cmd_train, initial_model, model_path, obtain_model,
    summary_path, train_model, write_records, CompareSummary, MINWEIGHT_MAX_QUBITS,
};
pub use config::{
    default_train_batches, ChannelKind, CodeSpec, ConfigError, DecoderKind, RunConfig, SweepAxis,
};
pub use eval::{adjudicate, evaluate_point, run_trials, tally, PreparedDecoder, TrialOutcome, Verdict};
pub use record::{fmt_sig, write_csv, EvalRecord, CSV_HEADER};

use std::path::PathBuf;

use thiserror::Error;

use crate::code::{CodeError, DecodeMode};
use crate::nn::NnError;
use crate::noise::NoiseError;
use crate::reference::ReferenceError;
use crate::sampler::SamplerError;

/// Process exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for failures during a run.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Unsupported(String),
    #[error("model file {} not found; run `syndromic train` first or set auto_train", .0.display())]
    MissingModel(PathBuf),
    #[error("model was trained for {model} decoding, {requested} requested")]
    ModeMismatch { model: DecodeMode, requested: DecodeMode },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Unsupported(_) => EXIT_CONFIG,
            HarnessError::Nn(NnError::Config(_)) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}
