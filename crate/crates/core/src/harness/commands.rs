use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::{ChannelKind, DecoderKind, RunConfig, SweepAxis};
use super::eval::{evaluate_point, role, PreparedDecoder};
use super::record::{fmt_sig, write_csv, EvalRecord};
use super::HarnessError;
use crate::code::{DecodeMode, StabilizerCode};
use crate::nn::{train, LogRow, Mlp, MlpDecoderNet, TrainingReport};
use crate::noise::{DepolarizationModel, NoiseStats, TrainingStream, EMPIRICAL_STATS_SAMPLES};
use crate::reference::ReferenceError;
use crate::sampler::SamplerMode;
use crate::seed::rng_for;

/// Largest code the brute-force decoder is run on.
pub const MINWEIGHT_MAX_QUBITS: usize = 20;

/// `<model_dir>/<code>_<mode>_r<rate>_h<layers>.nndec`
pub fn model_path(config: &RunConfig, rate: f64, mode: DecodeMode) -> PathBuf {
    config.model_dir.join(format!(
        "{}_{}_r{}_h{}.nndec",
        config.code.tag(),
        mode,
        fmt_sig(rate),
        config.hidden_layers
    ))
}

/// A freshly initialized (untrained) network with its input statistics.
pub fn initial_model(
    code: &StabilizerCode,
    config: &RunConfig,
    rate: f64,
    mode: DecodeMode,
) -> Result<MlpDecoderNet, HarnessError> {
    let key = rate.to_bits();
    let model = DepolarizationModel::from_rate(rate)?;
    let mut stats_rng = rng_for(config.seed, &[role::STATS, key]);
    let stats = match config.channel {
        ChannelKind::Depolarizing => NoiseStats::for_code(code, &model, mode, &mut stats_rng)?,
        ChannelKind::IndependentXz => NoiseStats::empirical(
            code,
            &config.channel.at_rate(rate)?,
            mode,
            EMPIRICAL_STATS_SAMPLES,
            &mut stats_rng,
        )?,
    };
    let mlp = config.mlp_config(code.input_width(mode)?, code.output_width(mode));
    mlp.validate()?;
    let net = Mlp::new(&mlp.dims(), &mut rng_for(config.seed, &[role::INIT, key]))?;
    Ok(MlpDecoderNet {
        net,
        stats,
        fidelity: model.fidelity(),
        mode,
        lattice: code.toric_size().unwrap_or(0) as u64,
        samples_seen: 0,
    })
}

/// Trains one network for `rate` as configured.
pub fn train_model(
    code: &StabilizerCode,
    config: &RunConfig,
    rate: f64,
    mode: DecodeMode,
    on_log: impl FnMut(&LogRow),
) -> Result<(MlpDecoderNet, TrainingReport), HarnessError> {
    let key = rate.to_bits();
    let mut model = initial_model(code, config, rate, mode)?;
    let channel = config.channel.at_rate(rate)?;
    let mlp = config.mlp_config(code.input_width(mode)?, code.output_width(mode));
    let mut stream = TrainingStream::new(
        code,
        channel,
        mode,
        model.stats,
        config.batch_size,
        rng_for(config.seed, &[role::TRAIN, key]),
    )?;
    let validation = TrainingStream::new(
        code,
        channel,
        mode,
        model.stats,
        config.validation_size,
        rng_for(config.seed, &[role::VALIDATION, key]),
    )?
    .next_batch();
    let report = train(
        &mut model.net,
        &mlp,
        config.train_batches,
        &mut stream,
        &validation,
        config.log_every,
        on_log,
    )?;
    model.samples_seen = report.samples_seen;
    Ok((model, report))
}

fn create_parent(path: &Path) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn train_and_save(
    code: &StabilizerCode,
    config: &RunConfig,
    rate: f64,
    mode: DecodeMode,
) -> Result<(PathBuf, MlpDecoderNet), HarnessError> {
    let path = model_path(config, rate, mode);
    create_parent(&path)?;
    let log_path = path.with_extension("log.csv");
    let mut log = BufWriter::new(File::create(&log_path)?);
    writeln!(log, "step,lr,train_bce,validation_bce")?;
    let mut write_err = None;
    log::info!("training {} at rate {rate}", path.display());
    let (model, report) = train_model(code, config, rate, mode, |row| {
        log::info!(
            "step {} lr {} train_bce {} validation_bce {}",
            row.step,
            fmt_sig(row.lr),
            fmt_sig(row.train_bce),
            fmt_sig(row.validation_bce)
        );
        let line = format!(
            "{},{},{},{}",
            row.step,
            fmt_sig(row.lr),
            fmt_sig(row.train_bce),
            fmt_sig(row.validation_bce)
        );
        if let Err(e) = writeln!(log, "{line}") {
            write_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    log.flush()?;
    log::info!(
        "validation BCE {} -> {}",
        fmt_sig(report.initial_validation_bce),
        fmt_sig(report.final_validation_bce)
    );
    model.save(&path)?;
    Ok((path, model))
}

/// Trains and saves one network per configured rate. Returns the model
/// paths.
pub fn cmd_train(config: &RunConfig) -> Result<Vec<PathBuf>, HarnessError> {
    config.validate()?;
    let code = config.code.build()?;
    code.input_width(config.mode)?;
    let mut paths = Vec::new();
    for &rate in &config.rates {
        paths.push(train_and_save(&code, config, rate, config.mode)?.0);
    }
    Ok(paths)
}

/// The network used for `rate`: the reuse model if configured, otherwise
/// the per-rate model file (trained on demand when `auto_train` is set).
pub fn obtain_model(
    code: &StabilizerCode,
    config: &RunConfig,
    rate: f64,
    mode: DecodeMode,
) -> Result<MlpDecoderNet, HarnessError> {
    let model = if let Some(path) = &config.reuse_model {
        MlpDecoderNet::load(path)?
    } else {
        let path = model_path(config, rate, mode);
        if path.exists() {
            MlpDecoderNet::load(&path)?
        } else if config.auto_train {
            train_and_save(code, config, rate, mode)?.1
        } else {
            return Err(HarnessError::MissingModel(path));
        }
    };
    if model.mode != mode {
        return Err(HarnessError::ModeMismatch {
            model: model.mode,
            requested: mode,
        });
    }
    Ok(model)
}

fn prepare_reference(
    code: &StabilizerCode,
    config: &RunConfig,
    kind: DecoderKind,
    rate: f64,
) -> Result<PreparedDecoder<'static>, HarnessError> {
    match kind {
        DecoderKind::Mwpm => {
            if code.toric_size().is_none() {
                return Err(ReferenceError::NotToric.into());
            }
            Ok(PreparedDecoder::Mwpm)
        }
        DecoderKind::Ml => Ok(PreparedDecoder::Ml(DepolarizationModel::from_rate(rate)?)),
        DecoderKind::MinWeight => {
            let n = code.n_qubits();
            if n > MINWEIGHT_MAX_QUBITS {
                return Err(ReferenceError::SizeGuard {
                    needed: n,
                    limit: MINWEIGHT_MAX_QUBITS,
                }
                .into());
            }
            Ok(PreparedDecoder::MinWeight {
                cap: config.minweight_cap.unwrap_or(2 * n),
            })
        }
        DecoderKind::Neural => unreachable!("neural decoders need a model"),
    }
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), HarnessError> {
    create_parent(path)?;
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(&mut out, records)?;
    out.flush()?;
    Ok(())
}

/// Evaluates every configured decoder at every rate and writes the CSV.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Vec<EvalRecord>, HarnessError> {
    config.validate()?;
    let code = config.code.build()?;
    code.input_width(config.mode)?;
    let mut records = Vec::new();
    for &rate in &config.rates {
        let channel = config.channel.at_rate(rate)?;
        for &kind in &config.decoders {
            let model;
            let decoder = if kind == DecoderKind::Neural {
                model = obtain_model(&code, config, rate, config.mode)?;
                PreparedDecoder::neural(&model, &code, config.max_iter, config.sampler)?
            } else {
                prepare_reference(&code, config, kind, rate)?
            };
            let record = evaluate_point(
                &code,
                &channel,
                config.mode,
                &decoder,
                kind.as_str(),
                rate,
                config.trials,
                config.seed,
            )?;
            log::info!("{}", record.csv_row());
            records.push(record);
        }
    }
    write_records(&config.out, &records)?;
    Ok(records)
}

/// Joint corrected fraction against the square of the Z-only one, per
/// decoder family.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub rate: f64,
    pub neural_joint: f64,
    pub neural_z_only_squared: f64,
    pub mwpm_joint: f64,
    pub mwpm_z_only_squared: f64,
    /// Standard error of `neural_gap() - mwpm_gap()`, binomial errors
    /// propagated to first order.
    pub sigma: f64,
}

impl CompareSummary {
    pub const CSV_HEADER: &'static str =
        "rate,neural_joint,neural_z_only_squared,neural_gap,mwpm_joint,mwpm_z_only_squared,mwpm_gap,sigma";

    pub fn neural_gap(&self) -> f64 {
        self.neural_joint - self.neural_z_only_squared
    }

    pub fn mwpm_gap(&self) -> f64 {
        self.mwpm_joint - self.mwpm_z_only_squared
    }

    fn from_records(nj: &EvalRecord, nz: &EvalRecord, mj: &EvalRecord, mz: &EvalRecord) -> Self {
        let fz = |r: &EvalRecord| r.corrected_fraction();
        let var = nj.sigma().powi(2)
            + (2.0 * fz(nz) * nz.sigma()).powi(2)
            + mj.sigma().powi(2)
            + (2.0 * fz(mz) * mz.sigma()).powi(2);
        CompareSummary {
            rate: nj.rate,
            neural_joint: fz(nj),
            neural_z_only_squared: fz(nz).powi(2),
            mwpm_joint: fz(mj),
            mwpm_z_only_squared: fz(mz).powi(2),
            sigma: var.sqrt(),
        }
    }

    pub fn csv_row(&self) -> String {
        [
            self.rate,
            self.neural_joint,
            self.neural_z_only_squared,
            self.neural_gap(),
            self.mwpm_joint,
            self.mwpm_z_only_squared,
            self.mwpm_gap(),
            self.sigma,
        ]
        .map(fmt_sig)
        .join(",")
    }
}

/// Where the compare summary goes: `<out stem>.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

/// Neural and MWPM decoders in joint and Z-only mode on shared trials.
pub fn cmd_compare(config: &RunConfig) -> Result<(Vec<EvalRecord>, Vec<CompareSummary>), HarnessError> {
    config.validate()?;
    let code = config.code.build()?;
    code.input_width(DecodeMode::ZOnly)?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &rate in &config.rates {
        let channel = config.channel.at_rate(rate)?;
        let mut row = Vec::with_capacity(4);
        for mode in [DecodeMode::Joint, DecodeMode::ZOnly] {
            let model = obtain_model(&code, config, rate, mode)?;
            let neural = PreparedDecoder::neural(&model, &code, config.max_iter, config.sampler)?;
            for (id, decoder) in [("neural", &neural), ("mwpm", &PreparedDecoder::Mwpm)] {
                let r = evaluate_point(&code, &channel, mode, decoder, id, rate, config.trials, config.seed)?;
                log::info!("{}", r.csv_row());
                row.push(r);
            }
        }
        summaries.push(CompareSummary::from_records(&row[0], &row[2], &row[1], &row[3]));
        records.extend(row);
    }
    write_records(&config.out, &records)?;
    let path = summary_path(&config.out);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "{}", CompareSummary::CSV_HEADER)?;
    for s in &summaries {
        writeln!(out, "{}", s.csv_row())?;
    }
    out.flush()?;
    Ok((records, summaries))
}

/// One neural record per sweep value and rate. The sampler sweep adds an
/// untrained network per sampler.
pub fn cmd_sweep(config: &RunConfig) -> Result<Vec<EvalRecord>, HarnessError> {
    config.validate()?;
    let axis = config
        .sweep_axis
        .ok_or_else(|| HarnessError::Unsupported("sweep needs sweep_axis".into()))?;
    let code = config.code.build()?;
    let mode = config.mode;
    code.input_width(mode)?;
    let bad_value = |v: &str| {
        HarnessError::Config(super::ConfigError::Invalid(format!(
            "bad {} sweep value `{v}`",
            axis.as_str()
        )))
    };
    // parse every value before any compute
    let mut variants = Vec::new();
    for v in &config.sweep_values {
        let mut c = config.clone();
        match axis {
            SweepAxis::MaxIter => {
                c.max_iter = v.parse().ok().filter(|&m| m > 0).ok_or_else(|| bad_value(v))?
            }
            SweepAxis::HiddenLayers => c.hidden_layers = v.parse().map_err(|_| bad_value(v))?,
            SweepAxis::SamplerMode => {
                c.sampler = v.parse::<SamplerMode>().map_err(|_| bad_value(v))?
            }
        }
        variants.push((format!("neural[{}={v}]", axis.as_str()), c));
    }

    let mut records = Vec::new();
    for &rate in &config.rates {
        let channel = config.channel.at_rate(rate)?;
        let shared = match axis {
            SweepAxis::HiddenLayers => None,
            _ => Some(obtain_model(&code, config, rate, mode)?),
        };
        for (id, c) in &variants {
            let own;
            let model = match &shared {
                Some(m) => m,
                None => {
                    own = obtain_model(&code, c, rate, mode)?;
                    &own
                }
            };
            let decoder = PreparedDecoder::neural(model, &code, c.max_iter, c.sampler)?;
            let r = evaluate_point(&code, &channel, mode, &decoder, id, rate, c.trials, c.seed)?;
            log::info!("{}", r.csv_row());
            records.push(r);
        }
        if axis == SweepAxis::SamplerMode {
            let untrained = initial_model(&code, config, rate, mode)?;
            for (_, c) in &variants {
                let decoder = PreparedDecoder::neural(&untrained, &code, c.max_iter, c.sampler)?;
                let id = format!("neural-untrained[sampler={}]", c.sampler.as_str());
                let r = evaluate_point(&code, &channel, mode, &decoder, &id, rate, c.trials, c.seed)?;
                log::info!("{}", r.csv_row());
                records.push(r);
            }
        }
    }
    write_records(&config.out, &records)?;
    Ok(records)
}
