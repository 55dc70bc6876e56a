//! Error channels, syndrome normalization statistics, and the on-the-fly
//! stream of training pairs.

use ndarray::Array2;
use rand::Rng as _;
use thiserror::Error;

use crate::code::{CodeError, DecodeMode, ErrorVector, StabilizerCode, Syndrome};
use crate::gf2::BitVec;
use crate::seed::Rng;

/// Warm-up sample count for empirically estimated normalization statistics.
pub const EMPIRICAL_STATS_SAMPLES: usize = 100_000;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("syndrome variance is zero; inputs cannot be normalized")]
    DegenerateStats,
    #[error("batch size must be at least 1")]
    EmptyBatch,
    #[error("input has {found} bits, statistics expect {expected}")]
    Width { expected: usize, found: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn check_probability(p: f64) -> Result<f64, NoiseError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(NoiseError::OutOfRange(p))
    }
}

/// Rate at which a single eigenvalue flips under depolarization with
/// fidelity `p`: two of the three Paulis flip any given axis.
pub fn flip_rate(fidelity: f64) -> Result<f64, NoiseError> {
    Ok(2.0 / 3.0 * (1.0 - check_probability(fidelity)?))
}

/// Single-qubit depolarization with fidelity `p`: `I` with probability `p`,
/// each of `X`, `Y`, `Z` with `(1 - p) / 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizationModel {
    fidelity: f64,
}

impl DepolarizationModel {
    pub fn new(fidelity: f64) -> Result<Self, NoiseError> {
        Ok(DepolarizationModel {
            fidelity: check_probability(fidelity)?,
        })
    }

    pub fn from_rate(rate: f64) -> Result<Self, NoiseError> {
        Self::new(1.0 - check_probability(rate)?)
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    pub fn rate(&self) -> f64 {
        1.0 - self.fidelity
    }

    /// `[P(I), P(X), P(Y), P(Z)]`.
    pub fn pauli_probabilities(&self) -> [f64; 4] {
        let e = self.rate() / 3.0;
        [self.fidelity, e, e, e]
    }

    pub fn sample_error(&self, n_qubits: usize, rng: &mut Rng) -> ErrorVector {
        let mut e = BitVec::zeros(2 * n_qubits);
        self.sample_into(n_qubits, rng, &mut e);
        e
    }

    pub fn sample_into(&self, n_qubits: usize, rng: &mut Rng, out: &mut ErrorVector) {
        debug_assert_eq!(out.len(), 2 * n_qubits);
        out.clear();
        let third = self.rate() / 3.0;
        for q in 0..n_qubits {
            let u: f64 = rng.random();
            if u < self.fidelity {
                continue;
            }
            let u = u - self.fidelity;
            if u < third {
                out.set(q, true);
            } else if u < 2.0 * third {
                out.set(q, true);
                out.set(n_qubits + q, true);
            } else {
                out.set(n_qubits + q, true);
            }
        }
    }
}

/// Error channels the harness can draw from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Depolarizing(DepolarizationModel),
    /// X and Z flips drawn independently, each at the depolarizing flip
    /// rate of the same fidelity. Same marginals, no Y correlation.
    IndependentXz { fidelity: f64 },
}

impl Channel {
    pub fn fidelity(&self) -> f64 {
        match self {
            Channel::Depolarizing(m) => m.fidelity(),
            Channel::IndependentXz { fidelity } => *fidelity,
        }
    }

    pub fn sample_into(&self, n_qubits: usize, rng: &mut Rng, out: &mut ErrorVector) {
        match self {
            Channel::Depolarizing(m) => m.sample_into(n_qubits, rng, out),
            Channel::IndependentXz { fidelity } => {
                out.clear();
                let q = 2.0 / 3.0 * (1.0 - fidelity);
                for i in 0..2 * n_qubits {
                    if rng.random::<f64>() < q {
                        out.set(i, true);
                    }
                }
            }
        }
    }

    pub fn sample_error(&self, n_qubits: usize, rng: &mut Rng) -> ErrorVector {
        let mut e = BitVec::zeros(2 * n_qubits);
        self.sample_into(n_qubits, rng, &mut e);
        e
    }
}

/// Mean and variance of a syndrome bit, used to standardize network inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseStats {
    /// Per-axis flip rate.
    pub q: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Odd-parity probability of four independent flips at rate `q`, and its
/// Bernoulli variance. Exact for weight-4 generators.
pub fn syndrome_stats(q: f64) -> Result<NoiseStats, NoiseError> {
    let q = check_probability(q)?;
    let r = 1.0 - q;
    let mean = 4.0 * q.powi(3) * r + 4.0 * q * r.powi(3);
    Ok(NoiseStats {
        q,
        mean,
        variance: mean - mean * mean,
    })
}

impl NoiseStats {
    /// Pooled syndrome-bit frequency over `samples` draws of the channel.
    pub fn empirical(
        code: &StabilizerCode,
        channel: &Channel,
        mode: DecodeMode,
        samples: usize,
        rng: &mut Rng,
    ) -> Result<Self, NoiseError> {
        let n = code.n_qubits();
        let mut error = BitVec::zeros(2 * n);
        let mut syndrome = BitVec::zeros(code.n_generators());
        let mut ones = 0usize;
        let mut total = 0usize;
        for _ in 0..samples {
            channel.sample_into(n, rng, &mut error);
            code.syndrome_matrix().matvec_into(&error, &mut syndrome);
            let input = code.restrict_syndrome(&syndrome, mode)?;
            ones += input.count_ones();
            total += input.len();
        }
        let mean = if total == 0 { 0.0 } else { ones as f64 / total as f64 };
        Ok(NoiseStats {
            q: flip_rate(channel.fidelity())?,
            mean,
            variance: mean - mean * mean,
        })
    }

    /// Analytic statistics for weight-4 CSS codes, otherwise an empirical
    /// estimate from [`EMPIRICAL_STATS_SAMPLES`] draws.
    pub fn for_code(
        code: &StabilizerCode,
        model: &DepolarizationModel,
        mode: DecodeMode,
        rng: &mut Rng,
    ) -> Result<Self, NoiseError> {
        if code.has_weight_four_css_generators() {
            syndrome_stats(flip_rate(model.fidelity())?)
        } else {
            Self::empirical(
                code,
                &Channel::Depolarizing(*model),
                mode,
                EMPIRICAL_STATS_SAMPLES,
                rng,
            )
        }
    }

    fn scale(&self) -> Result<(f32, f32), NoiseError> {
        if self.variance.is_nan() || self.variance <= 0.0 {
            return Err(NoiseError::DegenerateStats);
        }
        let sd = self.variance.sqrt();
        Ok(((-self.mean / sd) as f32, (1.0 / sd) as f32))
    }
}

/// `(s[i] - P_s) / sqrt(V_s)` for every syndrome bit.
pub fn normalize_syndrome(syndrome: &Syndrome, stats: &NoiseStats) -> Result<Vec<f32>, NoiseError> {
    let mut out = vec![0.0; syndrome.len()];
    normalize_into(syndrome, stats, &mut out)?;
    Ok(out)
}

pub fn normalize_into(
    syndrome: &Syndrome,
    stats: &NoiseStats,
    out: &mut [f32],
) -> Result<(), NoiseError> {
    if out.len() != syndrome.len() {
        return Err(NoiseError::Width {
            expected: out.len(),
            found: syndrome.len(),
        });
    }
    let (zero, step) = stats.scale()?;
    out.iter_mut().for_each(|v| *v = zero);
    for i in syndrome.iter_ones() {
        out[i] = zero + step;
    }
    Ok(())
}

/// One mini-batch: normalized syndromes (rows) and their error bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: Array2<f32>,
    pub targets: Array2<f32>,
}

/// Unbounded stream of fresh training batches drawn from a channel.
pub struct TrainingStream<'a> {
    code: &'a StabilizerCode,
    channel: Channel,
    mode: DecodeMode,
    stats: NoiseStats,
    batch_size: usize,
    rng: Rng,
    error: ErrorVector,
    syndrome: Syndrome,
}

impl<'a> TrainingStream<'a> {
    pub fn new(
        code: &'a StabilizerCode,
        channel: Channel,
        mode: DecodeMode,
        stats: NoiseStats,
        batch_size: usize,
        rng: Rng,
    ) -> Result<Self, NoiseError> {
        if batch_size == 0 {
            return Err(NoiseError::EmptyBatch);
        }
        stats.scale()?;
        code.input_width(mode)?;
        Ok(TrainingStream {
            code,
            channel,
            mode,
            stats,
            batch_size,
            rng,
            error: BitVec::zeros(2 * code.n_qubits()),
            syndrome: BitVec::zeros(code.n_generators()),
        })
    }

    pub fn next_batch(&mut self) -> Batch {
        let code = self.code;
        let in_w = code.input_width(self.mode).expect("checked at construction");
        let out_w = code.output_width(self.mode);
        let mut inputs = Array2::zeros((self.batch_size, in_w));
        let mut targets = Array2::zeros((self.batch_size, out_w));
        let (zero, step) = self.stats.scale().expect("checked at construction");
        for b in 0..self.batch_size {
            self.channel
                .sample_into(code.n_qubits(), &mut self.rng, &mut self.error);
            code.syndrome_matrix()
                .matvec_into(&self.error, &mut self.syndrome);
            let input = code
                .restrict_syndrome(&self.syndrome, self.mode)
                .expect("checked at construction");
            let mut row = inputs.row_mut(b);
            row.fill(zero);
            for i in input.iter_ones() {
                row[i] = zero + step;
            }
            let mut row = targets.row_mut(b);
            for i in self.error.iter_ones().take_while(|&i| i < out_w) {
                row[i] = 1.0;
            }
        }
        Batch { inputs, targets }
    }
}

impl Iterator for TrainingStream<'_> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        Some(self.next_batch())
    }
}
