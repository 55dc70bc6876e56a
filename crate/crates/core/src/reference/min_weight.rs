//! Exhaustive minimum-weight decoding for small codes.
//!
//! Candidates are visited in increasing Hamming weight of the `2N`-bit error
//! vector and, within a weight, in lexicographic order of their sorted
//! support. The first consistent candidate is returned.

use super::ReferenceError;
use crate::code::{ErrorVector, StabilizerCode, Syndrome};
use crate::gf2::{BitMatrix, BitVec};

/// Depth-first walk over supports `i₁ < i₂ < … < i_w` keeping a running
/// syndrome per depth.
struct Search<'a> {
    columns: &'a [BitVec],
    target: &'a BitVec,
    stack: Vec<BitVec>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize, weight: usize, start: usize) -> bool {
        if depth == weight {
            return self.stack[depth] == *self.target;
        }
        let remaining = weight - depth;
        for i in start..=self.columns.len() - remaining {
            let mut next = self.stack[depth].clone();
            next.xor_with(&self.columns[i]);
            self.stack[depth + 1] = next;
            self.chosen.push(i);
            if self.visit(depth + 1, weight, i + 1) {
                return true;
            }
            self.chosen.pop();
        }
        false
    }
}

/// Smallest support (by weight, then lexicographically) with `M · e = s`,
/// where `M` has the given columns.
fn search(columns: &[BitVec], target: &BitVec, cap: usize) -> Option<Vec<usize>> {
    let rows = target.len();
    for weight in 0..=cap.min(columns.len()) {
        let mut s = Search {
            columns,
            target,
            stack: vec![BitVec::zeros(rows); weight + 1],
            chosen: Vec::with_capacity(weight),
        };
        if s.visit(0, weight, 0) {
            return Some(s.chosen);
        }
    }
    None
}

fn columns_of(matrix: &BitMatrix, rows: &[usize], cols: std::ops::Range<usize>) -> Vec<BitVec> {
    cols.map(|c| BitVec::from_bools(&rows.iter().map(|&r| matrix.get(r, c)).collect::<Vec<_>>()))
        .collect()
}

/// Minimum-Hamming-weight error reproducing `syndrome`, searching weights up
/// to `weight_cap`.
///
/// For CSS codes the X and Z parts are searched independently; the result is
/// the same vector a joint search would return, because a minimum-weight
/// joint solution is a minimum-weight solution in each part and the X bits
/// precede the Z bits in the support order.
pub fn min_weight_decode(
    code: &StabilizerCode,
    syndrome: &Syndrome,
    weight_cap: usize,
) -> Result<ErrorVector, ReferenceError> {
    let n = code.n_qubits();
    let m = code.syndrome_matrix();
    if syndrome.len() != m.nrows() {
        return Err(ReferenceError::SyndromeWidth {
            expected: m.nrows(),
            found: syndrome.len(),
        });
    }
    if m.solve(syndrome)?.is_none() {
        return Err(ReferenceError::InvalidSyndrome);
    }
    let not_found = || ReferenceError::NotFound { cap: weight_cap };
    let mut error = BitVec::zeros(2 * n);
    match code.css_split() {
        Some(css) => {
            // Z-type rows see the X part, X-type rows the Z part.
            let mut budget = weight_cap;
            for (rows, offset) in [(&css.z_rows, 0), (&css.x_rows, n)] {
                let columns = columns_of(m, rows, offset..offset + n);
                let target = BitVec::from_bools(&rows.iter().map(|&r| syndrome.get(r)).collect::<Vec<_>>());
                let support = search(&columns, &target, budget).ok_or_else(not_found)?;
                budget -= support.len();
                for i in support {
                    error.set(offset + i, true);
                }
            }
        }
        None => {
            let all: Vec<usize> = (0..m.nrows()).collect();
            let columns = columns_of(m, &all, 0..2 * n);
            for i in search(&columns, syndrome, weight_cap).ok_or_else(not_found)? {
                error.set(i, true);
            }
        }
    }
    Ok(error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_toric;
    use crate::noise::DepolarizationModel;
    use crate::seed::rng_for;

    #[test]
    fn zero_syndrome_gives_zero_vector() {
        let code = build_toric(3).unwrap();
        let e = min_weight_decode(&code, &BitVec::zeros(18), 0).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn single_x_error_found_at_weight_one() {
        let code = build_toric(3).unwrap();
        for q in 0..18 {
            let e = BitVec::from_indices(36, &[q]);
            let s = code.syndrome(&e).unwrap();
            let found = min_weight_decode(&code, &s, 4).unwrap();
            assert_eq!(found.count_ones(), 1);
            assert_eq!(code.syndrome(&found).unwrap(), s);
        }
    }

    #[test]
    fn cap_zero_with_defects_is_not_found() {
        let code = build_toric(3).unwrap();
        let s = code.syndrome(&BitVec::from_indices(36, &[4])).unwrap();
        assert!(matches!(
            min_weight_decode(&code, &s, 0),
            Err(ReferenceError::NotFound { cap: 0 })
        ));
    }

    #[test]
    fn unreachable_syndrome_rejected() {
        let code = build_toric(3).unwrap();
        let s = BitVec::from_indices(18, &[0]);
        assert!(matches!(
            min_weight_decode(&code, &s, 18),
            Err(ReferenceError::InvalidSyndrome)
        ));
    }

    // Oracle: scan all 2^(2N) vectors in order of (weight, support).
    fn brute_force(code: &StabilizerCode, s: &Syndrome) -> ErrorVector {
        let bits = 2 * code.n_qubits();
        let mut best: Option<(usize, Vec<usize>)> = None;
        for mask in 0u64..1 << bits {
            let support: Vec<usize> = (0..bits).filter(|&i| mask >> i & 1 == 1).collect();
            let e = BitVec::from_indices(bits, &support);
            if code.syndrome(&e).unwrap() != *s {
                continue;
            }
            let key = (support.len(), support);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        BitVec::from_indices(bits, &best.unwrap().1)
    }

    #[test]
    fn split_search_matches_joint_brute_force() {
        let code = build_toric(2).unwrap();
        let model = DepolarizationModel::new(0.7).unwrap();
        let mut rng = rng_for(4, &[]);
        for _ in 0..20 {
            let e = model.sample_error(8, &mut rng);
            let s = code.syndrome(&e).unwrap();
            assert_eq!(min_weight_decode(&code, &s, 16).unwrap(), brute_force(&code, &s));
        }
    }

    #[test]
    fn non_css_search_matches_brute_force() {
        // five-qubit code
        let text = "stabilizer-code v1\nn=5 k=1\n\
                    1001001100\n0100100110\n1010000011\n0101010001\n\n\
                    1111100000\n0000011111\n";
        let code = StabilizerCode::parse(text).unwrap();
        assert!(code.css_split().is_none());
        for mask in 0u64..16 {
            let s = BitVec::from_indices(4, &(0..4).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>());
            let found = min_weight_decode(&code, &s, 10).unwrap();
            assert_eq!(found, brute_force(&code, &s));
        }
    }
}
