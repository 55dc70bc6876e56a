//! Turning network marginals into a syndrome-consistent error.
//!
//! A candidate is drawn bit-by-bit from the marginals. While its syndrome
//! disagrees with the measured one, either the whole candidate is redrawn
//! (naive) or only the bits adjacent to the violated checks are
//! (hard-decision message passing). Every redraw uses the original
//! marginals. After `max_iter` syndrome checks the decoder gives up.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use thiserror::Error;

use crate::code::{CodeError, DecodeMode, ErrorVector, ParitySystem, StabilizerCode, Syndrome};
use crate::gf2::BitVec;
use crate::nn::{MlpDecoderNet, NnError};
use crate::seed::Rng;

pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("{what} has width {found}, expected {expected}")]
    Width {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("network was trained in {net} mode but {requested} decoding was requested")]
    ModeMismatch { net: DecodeMode, requested: DecodeMode },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerMode {
    Naive,
    MessagePassing,
}

impl SamplerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerMode::Naive => "naive",
            SamplerMode::MessagePassing => "message_passing",
        }
    }
}

impl fmt::Display for SamplerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(SamplerMode::Naive),
            "message_passing" => Ok(SamplerMode::MessagePassing),
            other => Err(format!(
                "unknown sampler {other:?} (expected naive or message_passing)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Success,
    /// Iteration cap reached: a detected but uncorrected error.
    GiveUp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Present exactly when `status` is `Success`; reproduces the input
    /// syndrome.
    pub predicted: Option<ErrorVector>,
    pub iterations: usize,
    pub sampler: SamplerMode,
}

/// One independent Bernoulli draw per bit.
pub fn sample_candidate(marginals: &[f32], rng: &mut Rng) -> BitVec {
    let mut e = BitVec::zeros(marginals.len());
    for (i, &p) in marginals.iter().enumerate() {
        if rng.random::<f32>() < p {
            e.set(i, true);
        }
    }
    e
}

/// Samples from `marginals` until `system · e == target` or `max_iter`
/// syndrome checks have failed.
pub fn sample_until_consistent(
    system: &ParitySystem,
    marginals: &[f32],
    target: &Syndrome,
    max_iter: usize,
    sampler: SamplerMode,
    rng: &mut Rng,
) -> Result<DecodeOutcome, SamplerError> {
    if max_iter == 0 {
        return Err(SamplerError::ZeroIterations);
    }
    if marginals.len() != system.n_bits() {
        return Err(SamplerError::Width {
            what: "marginal vector",
            expected: system.n_bits(),
            found: marginals.len(),
        });
    }
    if target.len() != system.n_checks() {
        return Err(SamplerError::Width {
            what: "syndrome",
            expected: system.n_checks(),
            found: target.len(),
        });
    }

    let mut candidate = sample_candidate(marginals, rng);
    let mut current = BitVec::zeros(system.n_checks());
    let mut touched = BitVec::zeros(system.n_bits());
    for iteration in 1..=max_iter {
        system.syndrome_into(&candidate, &mut current);
        if current == *target {
            return Ok(DecodeOutcome {
                status: DecodeStatus::Success,
                predicted: Some(candidate),
                iterations: iteration,
                sampler,
            });
        }
        if iteration == max_iter {
            break;
        }
        match sampler {
            SamplerMode::Naive => candidate = sample_candidate(marginals, rng),
            SamplerMode::MessagePassing => {
                current.xor_with(target);
                touched.clear();
                for check in current.iter_ones() {
                    for &bit in system.neighborhood(check) {
                        touched.set(bit, true);
                    }
                }
                for bit in touched.iter_ones() {
                    candidate.set(bit, rng.random::<f32>() < marginals[bit]);
                }
            }
        }
    }
    Ok(DecodeOutcome {
        status: DecodeStatus::GiveUp,
        predicted: None,
        iterations: max_iter,
        sampler,
    })
}

/// A trained network bound to the code it decodes.
pub struct NeuralDecoder<'a> {
    net: &'a MlpDecoderNet,
    system: ParitySystem,
    input_width: usize,
}

impl<'a> NeuralDecoder<'a> {
    pub fn new(net: &'a MlpDecoderNet, code: &StabilizerCode) -> Result<Self, SamplerError> {
        let mode = net.mode;
        let input_width = code.input_width(mode)?;
        let system = code.parity_system(mode)?;
        if net.net.input_width() != input_width {
            return Err(SamplerError::Width {
                what: "network input",
                expected: input_width,
                found: net.net.input_width(),
            });
        }
        if net.net.output_width() != system.n_bits() {
            return Err(SamplerError::Width {
                what: "network output",
                expected: system.n_bits(),
                found: net.net.output_width(),
            });
        }
        Ok(NeuralDecoder {
            net,
            system,
            input_width,
        })
    }

    pub fn mode(&self) -> DecodeMode {
        self.net.mode
    }

    /// Decodes a syndrome restricted to this decoder's mode (all generators
    /// for joint, Z-type generators for Z-only). A successful prediction
    /// covers the mode's error bits.
    pub fn decode(
        &self,
        syndrome: &Syndrome,
        max_iter: usize,
        sampler: SamplerMode,
        rng: &mut Rng,
    ) -> Result<DecodeOutcome, SamplerError> {
        if syndrome.len() != self.input_width {
            return Err(SamplerError::Width {
                what: "syndrome",
                expected: self.input_width,
                found: syndrome.len(),
            });
        }
        let marginals = self.net.marginals(syndrome)?;
        sample_until_consistent(&self.system, &marginals, syndrome, max_iter, sampler, rng)
    }
}

/// Joint decoding of a full syndrome.
pub fn decode(
    net: &MlpDecoderNet,
    code: &StabilizerCode,
    syndrome: &Syndrome,
    max_iter: usize,
    sampler: SamplerMode,
    rng: &mut Rng,
) -> Result<DecodeOutcome, SamplerError> {
    if net.mode != DecodeMode::Joint {
        return Err(SamplerError::ModeMismatch {
            net: net.mode,
            requested: DecodeMode::Joint,
        });
    }
    NeuralDecoder::new(net, code)?.decode(syndrome, max_iter, sampler, rng)
}

/// Decodes the Z-type (plaquette) syndrome block into X-part error bits.
pub fn decode_z_only(
    net: &MlpDecoderNet,
    code: &StabilizerCode,
    plaquette_syndrome: &Syndrome,
    max_iter: usize,
    sampler: SamplerMode,
    rng: &mut Rng,
) -> Result<DecodeOutcome, SamplerError> {
    if code.css_split().is_none() {
        return Err(CodeError::NotCss.into());
    }
    if net.mode != DecodeMode::ZOnly {
        return Err(SamplerError::ModeMismatch {
            net: net.mode,
            requested: DecodeMode::ZOnly,
        });
    }
    NeuralDecoder::new(net, code)?.decode(plaquette_syndrome, max_iter, sampler, rng)
}
