//! `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown or repeated keys are errors.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::code::{build_toric, DecodeMode, StabilizerCode};
use crate::nn::{LrSchedule, MlpConfig, DEFAULT_INITIAL_LR};
use crate::noise::{Channel, DepolarizationModel, NoiseError};
use crate::sampler::{SamplerMode, DEFAULT_MAX_ITER};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    Value { line: usize, key: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Toric(usize),
    File(PathBuf),
}

impl CodeSpec {
    pub fn build(&self) -> Result<StabilizerCode, crate::code::CodeError> {
        match self {
            CodeSpec::Toric(l) => build_toric(*l),
            CodeSpec::File(path) => StabilizerCode::load(path),
        }
    }

    /// Short tag used in model file names.
    pub fn tag(&self) -> String {
        match self {
            CodeSpec::Toric(l) => format!("toric{l}"),
            CodeSpec::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "code".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Neural,
    Mwpm,
    Ml,
    MinWeight,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Neural => "neural",
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::Ml => "ml",
            DecoderKind::MinWeight => "minweight",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "neural" => Ok(DecoderKind::Neural),
            "mwpm" => Ok(DecoderKind::Mwpm),
            "ml" => Ok(DecoderKind::Ml),
            "minweight" => Ok(DecoderKind::MinWeight),
            other => Err(format!("unknown decoder `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Depolarizing,
    /// Diagnostic: X and Z flips drawn independently.
    IndependentXz,
}

impl ChannelKind {
    pub fn at_rate(self, rate: f64) -> Result<Channel, NoiseError> {
        let model = DepolarizationModel::from_rate(rate)?;
        Ok(match self {
            ChannelKind::Depolarizing => Channel::Depolarizing(model),
            ChannelKind::IndependentXz => Channel::IndependentXz {
                fidelity: model.fidelity(),
            },
        })
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "depolarizing" => Ok(ChannelKind::Depolarizing),
            "independent_xz" => Ok(ChannelKind::IndependentXz),
            other => Err(format!("unknown channel `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    MaxIter,
    HiddenLayers,
    SamplerMode,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::MaxIter => "max_iter",
            SweepAxis::HiddenLayers => "hidden_layers",
            SweepAxis::SamplerMode => "sampler",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max_iter" => Ok(SweepAxis::MaxIter),
            "hidden_layers" => Ok(SweepAxis::HiddenLayers),
            "sampler" | "sampler_mode" => Ok(SweepAxis::SamplerMode),
            other => Err(format!("unknown sweep axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub code: CodeSpec,
    /// Depolarization rates `1 - p`.
    pub rates: Vec<f64>,
    pub trials: u64,
    pub decoders: Vec<DecoderKind>,
    pub channel: ChannelKind,
    pub hidden_layers: usize,
    pub hidden_width_multiple: usize,
    /// Overrides `hidden_width_multiple × input width` when set.
    pub hidden_width: Option<usize>,
    pub batch_size: usize,
    pub train_batches: u64,
    pub lr_initial: f64,
    pub lr_decay: f64,
    /// Defaults to an eighth of `train_batches`.
    pub lr_period: Option<u64>,
    pub momentum: f64,
    pub log_every: u64,
    pub validation_size: usize,
    pub max_iter: usize,
    pub sampler: SamplerMode,
    pub mode: DecodeMode,
    pub seed: u64,
    /// Weight cap for the brute-force decoder; defaults to `2N`.
    pub minweight_cap: Option<usize>,
    pub model_dir: PathBuf,
    /// Use this model for every rate instead of one model per rate.
    pub reuse_model: Option<PathBuf>,
    /// Train missing models during `evaluate`, `compare` and `sweep`.
    pub auto_train: bool,
    pub out: PathBuf,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Vec<String>,
}

const KEYS: &[&str] = &[
    "lattice",
    "code_file",
    "rates",
    "trials",
    "decoders",
    "channel",
    "hidden_layers",
    "hidden_width_multiple",
    "hidden_width",
    "batch_size",
    "train_batches",
    "lr_initial",
    "lr_decay",
    "lr_period",
    "momentum",
    "log_every",
    "validation_size",
    "max_iter",
    "sampler",
    "mode",
    "seed",
    "minweight_cap",
    "model_dir",
    "reuse_model",
    "auto_train",
    "out",
    "sweep_axis",
    "sweep_values",
];

/// Default training length by lattice size.
pub fn default_train_batches(code: &CodeSpec) -> u64 {
    match code {
        CodeSpec::Toric(l) if *l >= 5 => 200_000,
        _ => 50_000,
    }
}

impl RunConfig {
    /// Defaults for a toric code of side `l`.
    pub fn toric(l: usize) -> Self {
        let code = CodeSpec::Toric(l);
        RunConfig {
            train_batches: default_train_batches(&code),
            code,
            rates: vec![0.1],
            trials: 10_000,
            decoders: vec![DecoderKind::Neural, DecoderKind::Mwpm],
            channel: ChannelKind::Depolarizing,
            hidden_layers: 4,
            hidden_width_multiple: 4,
            hidden_width: None,
            batch_size: 512,
            lr_initial: DEFAULT_INITIAL_LR,
            lr_decay: 0.5,
            lr_period: None,
            momentum: 0.0,
            log_every: 1000,
            validation_size: 10_000,
            max_iter: DEFAULT_MAX_ITER,
            sampler: SamplerMode::MessagePassing,
            mode: DecodeMode::Joint,
            seed: 0,
            minweight_cap: None,
            model_dir: PathBuf::from("models"),
            reuse_model: None,
            auto_train: false,
            out: PathBuf::from("results.csv"),
            sweep_axis: None,
            sweep_values: Vec::new(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if !seen.insert(key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            entries.push((line, key, value.trim()));
        }

        let code = match (
            entries.iter().find(|e| e.1 == "lattice"),
            entries.iter().find(|e| e.1 == "code_file"),
        ) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid(
                    "give either `lattice` or `code_file`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(ConfigError::Invalid(
                    "one of `lattice` or `code_file` is required".into(),
                ))
            }
            (Some(&(line, key, value)), None) => CodeSpec::Toric(scalar(line, key, value)?),
            (None, Some(&(_, _, value))) => CodeSpec::File(PathBuf::from(value)),
        };
        let mut config = RunConfig::toric(2);
        config.train_batches = default_train_batches(&code);
        config.code = code;

        for (line, key, value) in entries {
            match key {
                "lattice" | "code_file" => {}
                "rates" => config.rates = list(line, key, value)?,
                "trials" => config.trials = scalar(line, key, value)?,
                "decoders" => config.decoders = list(line, key, value)?,
                "channel" => config.channel = scalar(line, key, value)?,
                "hidden_layers" => config.hidden_layers = scalar(line, key, value)?,
                "hidden_width_multiple" => config.hidden_width_multiple = scalar(line, key, value)?,
                "hidden_width" => config.hidden_width = Some(scalar(line, key, value)?),
                "batch_size" => config.batch_size = scalar(line, key, value)?,
                "train_batches" => config.train_batches = scalar(line, key, value)?,
                "lr_initial" => config.lr_initial = scalar(line, key, value)?,
                "lr_decay" => config.lr_decay = scalar(line, key, value)?,
                "lr_period" => config.lr_period = Some(scalar(line, key, value)?),
                "momentum" => config.momentum = scalar(line, key, value)?,
                "log_every" => config.log_every = scalar(line, key, value)?,
                "validation_size" => config.validation_size = scalar(line, key, value)?,
                "max_iter" => config.max_iter = scalar(line, key, value)?,
                "sampler" => config.sampler = scalar(line, key, value)?,
                "mode" => config.mode = scalar(line, key, value)?,
                "seed" => config.seed = scalar(line, key, value)?,
                "minweight_cap" => config.minweight_cap = Some(scalar(line, key, value)?),
                "model_dir" => config.model_dir = PathBuf::from(value),
                "reuse_model" => config.reuse_model = Some(PathBuf::from(value)),
                "auto_train" => config.auto_train = scalar(line, key, value)?,
                "out" => config.out = PathBuf::from(value),
                "sweep_axis" => config.sweep_axis = Some(scalar(line, key, value)?),
                "sweep_values" => config.sweep_values = list(line, key, value)?,
                _ => unreachable!("key list checked above"),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if let CodeSpec::Toric(l) = self.code {
            if l < 2 {
                return bad(format!("lattice must be at least 2, got {l}"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(r) = self.rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return bad(format!("rate {r} is outside [0, 1]"));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.hidden_width_multiple == 0 || self.hidden_width == Some(0) {
            return bad("hidden width must be at least 1".into());
        }
        if self.validation_size == 0 {
            return bad("validation_size must be at least 1".into());
        }
        if self.decoders.is_empty() {
            return bad("at least one decoder is required".into());
        }
        if self.mode == DecodeMode::ZOnly && self.decoders.contains(&DecoderKind::Ml) {
            return bad("the ml decoder only supports joint mode".into());
        }
        if self.sweep_axis.is_some() && self.sweep_values.is_empty() {
            return bad("sweep_axis needs sweep_values".into());
        }
        // surface bad optimizer settings before any compute
        self.mlp_config(1, 1).validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn schedule(&self) -> LrSchedule {
        LrSchedule {
            initial: self.lr_initial,
            decay: self.lr_decay,
            period: self.lr_period.unwrap_or((self.train_batches / 8).max(1)),
        }
    }

    /// Network and optimizer settings for the given widths.
    pub fn mlp_config(&self, input_width: usize, output_width: usize) -> MlpConfig {
        let mut c = MlpConfig::new(input_width, output_width, self.hidden_layers, self.train_batches);
        c.hidden_width = self
            .hidden_width
            .unwrap_or(self.hidden_width_multiple * input_width);
        c.schedule = self.schedule();
        c.batch_size = self.batch_size;
        c.momentum = self.momentum;
        c.seed = self.seed;
        c
    }
}

fn scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        line,
        key: key.to_string(),
        msg: e.to_string(),
    })
}

fn list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| scalar(line, key, v))
        .collect()
}
