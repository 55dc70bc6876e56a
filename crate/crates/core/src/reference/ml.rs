//! Exact maximum-likelihood decoding by summing over stabilizer cosets.
//!
//! For a syndrome `s` pick any `e₀` with that syndrome. Logical class `c`
//! collects the errors `e₀ ⊕ L_c ⊕ g` where `L_c` is the product of the
//! logicals selected by the bits of `c` and `g` runs over the stabilizer
//! group. Class 0 is therefore the class of `e₀` itself.

use super::ReferenceError;
use crate::code::{ErrorVector, StabilizerCode, Syndrome};
use crate::gf2::BitVec;
use crate::noise::DepolarizationModel;

/// Largest supported `log2` of the number of enumerated terms
/// (`2^(N-k) · 4^k`).
pub const ML_MAX_TERMS_LOG2: usize = 26;
const MAX_STABILIZER_LOG2: usize = 20;

/// Split `(x ∥ z)` form for fast qubit-weight counting.
#[derive(Clone)]
struct Pauli {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Pauli {
    fn new(v: &BitVec, n: usize) -> Self {
        Pauli {
            x: v.slice(0, n).words().to_vec(),
            z: v.slice(n, 2 * n).words().to_vec(),
        }
    }

    fn xor(&mut self, other: &Pauli) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }
}

/// Per-class probability mass of one syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct MlClassWeights {
    /// The base error `e₀`.
    pub base: ErrorVector,
    /// Representative `e₀ ⊕ L_c` of every class.
    pub representatives: Vec<ErrorVector>,
    /// Unnormalized probability `Σ_g P(e₀ ⊕ L_c ⊕ g)` per class.
    pub probabilities: Vec<f64>,
}

impl MlClassWeights {
    /// Most probable class; ties go to the lowest index.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (c, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = c;
            }
        }
        best
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Class weights using the base error `e₀` chosen by Gaussian elimination.
pub fn ml_class_weights(
    code: &StabilizerCode,
    syndrome: &Syndrome,
    model: &DepolarizationModel,
) -> Result<MlClassWeights, ReferenceError> {
    let m = code.syndrome_matrix();
    if syndrome.len() != m.nrows() {
        return Err(ReferenceError::SyndromeWidth {
            expected: m.nrows(),
            found: syndrome.len(),
        });
    }
    let base = m.solve(syndrome)?.ok_or(ReferenceError::InvalidSyndrome)?;
    class_weights_from(code, &base, model)
}

pub(crate) fn class_weights_from(
    code: &StabilizerCode,
    base: &ErrorVector,
    model: &DepolarizationModel,
) -> Result<MlClassWeights, ReferenceError> {
    let n = code.n_qubits();
    let k = code.n_logical();
    let stabilizer_dim = n - k;
    if stabilizer_dim > MAX_STABILIZER_LOG2 {
        return Err(ReferenceError::SizeGuard {
            needed: stabilizer_dim,
            limit: MAX_STABILIZER_LOG2,
        });
    }
    if stabilizer_dim + 2 * k > ML_MAX_TERMS_LOG2 {
        return Err(ReferenceError::SizeGuard {
            needed: stabilizer_dim + 2 * k,
            limit: ML_MAX_TERMS_LOG2,
        });
    }
    let basis: Vec<Pauli> = code
        .checks()
        .row_basis()
        .iter()
        .map(|r| Pauli::new(r, n))
        .collect();
    debug_assert_eq!(basis.len(), stabilizer_dim);

    let p = model.fidelity();
    let ratio = (1.0 - p) / (3.0 * p);
    let scale = p.powi(n as i32);
    let logicals = code.logicals();
    let mut representatives = Vec::with_capacity(1 << (2 * k));
    let mut probabilities = Vec::with_capacity(1 << (2 * k));
    let mut histogram = vec![0u64; n + 1];
    for class in 0..1usize << (2 * k) {
        let mut rep = base.clone();
        for (j, logical) in logicals.iter().enumerate() {
            if class >> j & 1 == 1 {
                rep.xor_with(logical);
            }
        }
        histogram.fill(0);
        let mut current = Pauli::new(&rep, n);
        histogram[current.weight()] += 1;
        for step in 1u64..1 << stabilizer_dim {
            current.xor(&basis[step.trailing_zeros() as usize]);
            histogram[current.weight()] += 1;
        }
        let mass: f64 = histogram
            .iter()
            .enumerate()
            .map(|(w, &count)| count as f64 * ratio.powi(w as i32))
            .sum();
        probabilities.push(scale * mass);
        representatives.push(rep);
    }
    Ok(MlClassWeights {
        base: base.clone(),
        representatives,
        probabilities,
    })
}

/// Representative of the most probable logical class consistent with
/// `syndrome`.
pub fn exact_ml_decode(
    code: &StabilizerCode,
    syndrome: &Syndrome,
    model: &DepolarizationModel,
) -> Result<ErrorVector, ReferenceError> {
    let mut weights = ml_class_weights(code, syndrome, model)?;
    let best = weights.best();
    Ok(weights.representatives.swap_remove(best))
}
