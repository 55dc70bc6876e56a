//! Monte Carlo trials: sample an error, decode its syndrome, adjudicate.
//!
//! Trial `t` at rate `r` draws its error from
//! `rng_for(seed, [ERROR, bits(r), t])` and its decoder randomness from
//! `rng_for(seed, [DECODE, bits(r), t])`, so every decoder sees the same
//! errors and results do not depend on the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;

use super::record::EvalRecord;
use super::HarnessError;
use crate::code::{DecodeMode, ErrorVector, StabilizerCode, Syndrome};
use crate::gf2::BitVec;
use crate::nn::MlpDecoderNet;
use crate::noise::{Channel, DepolarizationModel};
use crate::reference::{exact_ml_decode, min_weight_decode, mwpm_decode, mwpm_decode_plaquettes};
use crate::sampler::{NeuralDecoder, SamplerMode};
use crate::seed::rng_for;

pub(crate) mod role {
    pub const ERROR: u64 = 1;
    pub const DECODE: u64 = 2;
    pub const INIT: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const VALIDATION: u64 = 5;
    pub const STATS: u64 = 6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Success,
    GiveUp,
    LogicalError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub verdict: Verdict,
    /// Sampler iterations; `0` for one-shot decoders.
    pub iterations: usize,
}

/// A decoder ready to run trials at one rate.
pub enum PreparedDecoder<'a> {
    Neural {
        decoder: NeuralDecoder<'a>,
        max_iter: usize,
        sampler: SamplerMode,
    },
    Mwpm,
    Ml(DepolarizationModel),
    MinWeight { cap: usize },
}

impl<'a> PreparedDecoder<'a> {
    pub fn neural(
        net: &'a MlpDecoderNet,
        code: &StabilizerCode,
        max_iter: usize,
        sampler: SamplerMode,
    ) -> Result<Self, HarnessError> {
        Ok(PreparedDecoder::Neural {
            decoder: NeuralDecoder::new(net, code)?,
            max_iter,
            sampler,
        })
    }

    /// Decodes a mode-restricted syndrome into mode-restricted error bits.
    fn decode(
        &self,
        code: &StabilizerCode,
        full: &Syndrome,
        mode: DecodeMode,
        seed: u64,
        path: &[u64],
    ) -> Result<(Option<BitVec>, usize), HarnessError> {
        let input = code.restrict_syndrome(full, mode)?;
        match self {
            PreparedDecoder::Neural {
                decoder,
                max_iter,
                sampler,
            } => {
                let mut rng = rng_for(seed, path);
                let out = decoder.decode(&input, *max_iter, *sampler, &mut rng)?;
                Ok((out.predicted, out.iterations))
            }
            PreparedDecoder::Mwpm => match mode {
                DecodeMode::Joint => Ok((Some(mwpm_decode(code, full)?), 0)),
                DecodeMode::ZOnly => Ok((Some(mwpm_decode_plaquettes(code, &input)?), 0)),
            },
            PreparedDecoder::Ml(model) => match mode {
                DecodeMode::Joint => Ok((Some(exact_ml_decode(code, full, model)?), 0)),
                DecodeMode::ZOnly => Err(HarnessError::Unsupported(
                    "the ml decoder only supports joint mode".into(),
                )),
            },
            PreparedDecoder::MinWeight { cap } => match mode {
                DecodeMode::Joint => Ok((Some(min_weight_decode(code, full, *cap)?), 0)),
                DecodeMode::ZOnly => {
                    // with the X-type block zeroed the minimum has no Z part
                    let css = code.css_split().expect("z_only requires CSS");
                    let mut masked = full.clone();
                    for &r in &css.x_rows {
                        masked.set(r, false);
                    }
                    let e = min_weight_decode(code, &masked, *cap)?;
                    Ok((Some(code.restrict_error(&e, mode)), 0))
                }
            },
        }
    }
}

/// Adjudicates a prediction: success iff the residual is a stabilizer.
pub fn adjudicate(
    code: &StabilizerCode,
    truth: &ErrorVector,
    predicted: Option<&BitVec>,
    mode: DecodeMode,
) -> Result<Verdict, HarnessError> {
    let Some(predicted) = predicted else {
        return Ok(Verdict::GiveUp);
    };
    let mut residual = code.lift_error(&code.restrict_error(truth, mode), mode);
    residual.xor_with(&code.lift_error(predicted, mode));
    if !code.syndrome(&residual)?.is_zero() {
        // decoders only return syndrome-consistent predictions
        debug_assert!(false, "prediction does not reproduce the syndrome");
        return Ok(Verdict::LogicalError);
    }
    Ok(if code.logical_class(&residual)?.is_trivial() {
        Verdict::Success
    } else {
        Verdict::LogicalError
    })
}

/// Runs `trials` rounds at `rate` and returns outcomes in trial order.
pub fn run_trials(
    code: &StabilizerCode,
    channel: &Channel,
    mode: DecodeMode,
    decoder: &PreparedDecoder<'_>,
    rate: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialOutcome>, HarnessError> {
    let n = code.n_qubits();
    let key = rate.to_bits();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let error = channel.sample_error(n, &mut rng_for(seed, &[role::ERROR, key, t]));
            let syndrome = code.syndrome(&error)?;
            let (predicted, iterations) =
                decoder.decode(code, &syndrome, mode, seed, &[role::DECODE, key, t])?;
            Ok(TrialOutcome {
                verdict: adjudicate(code, &error, predicted.as_ref(), mode)?,
                iterations,
            })
        })
        .collect()
}

pub fn tally(
    rate: f64,
    decoder: &str,
    mode: DecodeMode,
    outcomes: &[TrialOutcome],
    wall_time_s: f64,
    seed: u64,
) -> EvalRecord {
    let count = |v: Verdict| outcomes.iter().filter(|o| o.verdict == v).count() as u64;
    let trials = outcomes.len() as u64;
    let iterations: usize = outcomes.iter().map(|o| o.iterations).sum();
    EvalRecord {
        rate,
        decoder: decoder.to_string(),
        mode,
        trials,
        successes: count(Verdict::Success),
        giveups: count(Verdict::GiveUp),
        logical_errors: count(Verdict::LogicalError),
        mean_iterations: if trials == 0 { 0.0 } else { iterations as f64 / trials as f64 },
        wall_time_s,
        seed,
    }
}

/// [`run_trials`] followed by [`tally`], timing the run.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_point(
    code: &StabilizerCode,
    channel: &Channel,
    mode: DecodeMode,
    decoder: &PreparedDecoder<'_>,
    decoder_id: &str,
    rate: f64,
    trials: u64,
    seed: u64,
) -> Result<EvalRecord, HarnessError> {
    let start = Instant::now();
    let outcomes = run_trials(code, channel, mode, decoder, rate, trials, seed)?;
    Ok(tally(
        rate,
        decoder_id,
        mode,
        &outcomes,
        start.elapsed().as_secs_f64(),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_toric;

    fn depolarizing(rate: f64) -> Channel {
        Channel::Depolarizing(DepolarizationModel::from_rate(rate).unwrap())
    }

    #[test]
    fn zero_rate_is_always_corrected() {
        let code = build_toric(3).unwrap();
        let model = DepolarizationModel::from_rate(0.0).unwrap();
        for (decoder, mode) in [
            (PreparedDecoder::Mwpm, DecodeMode::Joint),
            (PreparedDecoder::Mwpm, DecodeMode::ZOnly),
            (PreparedDecoder::Ml(model), DecodeMode::Joint),
            (PreparedDecoder::MinWeight { cap: 36 }, DecodeMode::Joint),
            (PreparedDecoder::MinWeight { cap: 36 }, DecodeMode::ZOnly),
        ] {
            let r = evaluate_point(&code, &depolarizing(0.0), mode, &decoder, "x", 0.0, 50, 1).unwrap();
            assert_eq!(r.corrected_fraction(), 1.0);
        }
    }

    #[test]
    fn tallies_are_conserved_and_reproducible() {
        let code = build_toric(3).unwrap();
        let ch = depolarizing(0.1);
        let a = evaluate_point(&code, &ch, DecodeMode::Joint, &PreparedDecoder::Mwpm, "mwpm", 0.1, 400, 5).unwrap();
        let b = evaluate_point(&code, &ch, DecodeMode::Joint, &PreparedDecoder::Mwpm, "mwpm", 0.1, 400, 5).unwrap();
        assert_eq!(a.successes + a.giveups + a.logical_errors, a.trials);
        assert_eq!(a.csv_row_without_time(), b.csv_row_without_time());
        assert!(a.corrected_fraction() > 0.5 && a.corrected_fraction() < 1.0);
    }

    #[test]
    fn z_only_minweight_matches_mwpm_sector_success() {
        // both are exact minimum-weight decoders of the plaquette block but
        // may break ties differently, so only compare loosely
        let code = build_toric(3).unwrap();
        let ch = depolarizing(0.1);
        let m = evaluate_point(&code, &ch, DecodeMode::ZOnly, &PreparedDecoder::Mwpm, "m", 0.1, 500, 2).unwrap();
        let w = evaluate_point(&code, &ch, DecodeMode::ZOnly, &PreparedDecoder::MinWeight { cap: 18 }, "w", 0.1, 500, 2).unwrap();
        assert!((m.corrected_fraction() - w.corrected_fraction()).abs() < 5.0 * m.sigma().max(0.01));
    }

    #[test]
    fn giveup_is_a_failure() {
        let code = build_toric(2).unwrap();
        let e = BitVec::from_indices(16, &[0]);
        assert_eq!(adjudicate(&code, &e, None, DecodeMode::Joint).unwrap(), Verdict::GiveUp);
        assert_eq!(adjudicate(&code, &e, Some(&e), DecodeMode::Joint).unwrap(), Verdict::Success);
        let logical = &code.logicals()[0] ^ &e;
        assert_eq!(
            adjudicate(&code, &e, Some(&logical), DecodeMode::Joint).unwrap(),
            Verdict::LogicalError
        );
    }
}
