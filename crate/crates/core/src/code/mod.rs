//! Stabilizer codes: representation, validation, syndromes and logical-class
//! adjudication.

mod file;
mod toric;

pub use toric::{build_toric, ToricLattice};

use std::fmt;

use thiserror::Error;

use crate::gf2::{symplectic_product, BitMatrix, BitVec, Gf2Error};

/// A Pauli error up to phase, `2N` bits in `(x ∥ z)` layout.
pub type ErrorVector = BitVec;
/// Stabilizer measurement outcomes, one bit per generator row.
pub type Syndrome = BitVec;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("toric lattice side must be at least 2, got {0}")]
    LatticeTooSmall(usize),
    #[error(transparent)]
    Dimension(#[from] Gf2Error),
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("logical {logical} anticommutes with generator {row}")]
    LogicalNotInNormalizer { logical: usize, row: usize },
    #[error("logicals {0} and {1} violate the canonical pairing")]
    LogicalPairing(usize, usize),
    #[error("expected {expected} logical operators, found {found}")]
    LogicalCount { expected: usize, found: usize },
    #[error("generator rank is {found}, expected n - k = {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("residual has a nonzero syndrome; logical class is undefined")]
    NonzeroSyndrome,
    #[error("qubit count {0} is too large")]
    TooLarge(usize),
    #[error("operation requires a CSS code")]
    NotCss,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which part of the decoding problem a decoder sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeMode {
    /// All generators in, all `2N` error bits out.
    Joint,
    /// Z-type generators in, X-part error bits out.
    ZOnly,
}

impl DecodeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeMode::Joint => "joint",
            DecodeMode::ZOnly => "z_only",
        }
    }
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DecodeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "joint" => Ok(DecodeMode::Joint),
            "z_only" => Ok(DecodeMode::ZOnly),
            other => Err(format!("unknown mode {other:?} (expected joint or z_only)")),
        }
    }
}

/// Partition of the generator rows of a CSS code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssSplit {
    /// Z-type rows (plaquettes for the toric code).
    pub z_rows: Vec<usize>,
    /// X-type rows (stars for the toric code).
    pub x_rows: Vec<usize>,
}

/// Symplectic products of a residual with the ordered logicals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalClass {
    pub bits: BitVec,
}

impl LogicalClass {
    pub fn is_trivial(&self) -> bool {
        self.bits.is_zero()
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    checks: BitMatrix,
    logicals: Vec<BitVec>,
    css: Option<CssSplit>,
    lattice: Option<usize>,
    // rows with halves exchanged, so that syndrome = syndrome_matrix · e
    syndrome_matrix: BitMatrix,
}

/// Equality is structural: qubit count, `k`, generator rows and logicals.
impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.checks == other.checks
            && self.logicals == other.logicals
    }
}

impl Eq for StabilizerCode {}

impl StabilizerCode {
    /// Validated constructor. Rows and logicals are `2n`-bit symplectic
    /// vectors; logicals come in the order `X̄₁, Z̄₁, …, X̄ₖ, Z̄ₖ`.
    pub fn new(
        n: usize,
        k: usize,
        rows: Vec<BitVec>,
        logicals: Vec<BitVec>,
    ) -> Result<Self, CodeError> {
        let width = n.checked_mul(2).ok_or(CodeError::TooLarge(n))?;
        if let Some(bad) = rows.iter().chain(&logicals).find(|l| l.len() != width) {
            return Err(Gf2Error::DimensionMismatch {
                expected: width,
                found: bad.len(),
            }
            .into());
        }
        let css = detect_css(n, &rows);
        let code = Self::from_parts(n, k, rows, logicals, css, None);
        code.validate()?;
        Ok(code)
    }

    pub(crate) fn from_parts(
        n: usize,
        k: usize,
        rows: Vec<BitVec>,
        logicals: Vec<BitVec>,
        css: Option<CssSplit>,
        lattice: Option<usize>,
    ) -> Self {
        let swapped = rows
            .iter()
            .map(|r| r.swap_halves().expect("rows have even length"))
            .collect();
        let syndrome_matrix = BitMatrix::from_rows(2 * n, swapped).expect("uniform rows");
        let checks = BitMatrix::from_rows(2 * n, rows).expect("uniform rows");
        StabilizerCode {
            n,
            k,
            checks,
            logicals,
            css,
            lattice,
            syndrome_matrix,
        }
    }

    /// Checks every structural invariant: commuting generators, logicals in
    /// the normalizer with canonical pairing, and `rank == n - k`.
    pub fn validate(&self) -> Result<(), CodeError> {
        let rows = self.checks.rows();
        let swapped = self.syndrome_matrix.rows();
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in swapped.iter().enumerate().skip(i + 1) {
                if row.dot(other) {
                    return Err(CodeError::NonCommuting(i, j));
                }
            }
        }
        if self.logicals.len() != 2 * self.k {
            return Err(CodeError::LogicalCount {
                expected: 2 * self.k,
                found: self.logicals.len(),
            });
        }
        for (li, logical) in self.logicals.iter().enumerate() {
            if let Some(row) = swapped.iter().position(|s| s.dot(logical)) {
                return Err(CodeError::LogicalNotInNormalizer { logical: li, row });
            }
        }
        for i in 0..self.logicals.len() {
            for j in i + 1..self.logicals.len() {
                // X̄_a (index 2a) anticommutes only with Z̄_a (index 2a + 1)
                let expected = i % 2 == 0 && j == i + 1;
                if symplectic_product(&self.logicals[i], &self.logicals[j])? != expected {
                    return Err(CodeError::LogicalPairing(i, j));
                }
            }
        }
        let rank = self.checks.rank();
        let expected = self.n.checked_sub(self.k).ok_or(CodeError::RankMismatch {
            expected: 0,
            found: rank,
        })?;
        if rank != expected {
            return Err(CodeError::RankMismatch {
                expected,
                found: rank,
            });
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn n_logical(&self) -> usize {
        self.k
    }

    pub fn n_generators(&self) -> usize {
        self.checks.nrows()
    }

    pub fn checks(&self) -> &BitMatrix {
        &self.checks
    }

    pub fn logicals(&self) -> &[BitVec] {
        &self.logicals
    }

    pub fn css_split(&self) -> Option<&CssSplit> {
        self.css.as_ref()
    }

    /// Side length when the code came from [`build_toric`].
    pub fn toric_size(&self) -> Option<usize> {
        self.lattice
    }

    /// Rows with X and Z halves exchanged; `syndrome = M · e`.
    pub fn syndrome_matrix(&self) -> &BitMatrix {
        &self.syndrome_matrix
    }

    pub fn syndrome(&self, error: &ErrorVector) -> Result<Syndrome, CodeError> {
        Ok(self.syndrome_matrix.matvec(error)?)
    }

    pub fn logical_class(&self, residual: &ErrorVector) -> Result<LogicalClass, CodeError> {
        if !self.syndrome(residual)?.is_zero() {
            return Err(CodeError::NonzeroSyndrome);
        }
        let mut bits = BitVec::zeros(self.logicals.len());
        for (j, logical) in self.logicals.iter().enumerate() {
            if symplectic_product(logical, residual)? {
                bits.set(j, true);
            }
        }
        Ok(LogicalClass { bits })
    }

    /// True when every generator has Hamming weight 4 and the code is CSS,
    /// the setting where the analytic syndrome statistics are exact.
    pub fn has_weight_four_css_generators(&self) -> bool {
        self.css.is_some() && self.checks.rows().iter().all(|r| r.count_ones() == 4)
    }

    pub fn input_width(&self, mode: DecodeMode) -> Result<usize, CodeError> {
        match mode {
            DecodeMode::Joint => Ok(self.n_generators()),
            DecodeMode::ZOnly => Ok(self.css.as_ref().ok_or(CodeError::NotCss)?.z_rows.len()),
        }
    }

    pub fn output_width(&self, mode: DecodeMode) -> usize {
        match mode {
            DecodeMode::Joint => 2 * self.n,
            DecodeMode::ZOnly => self.n,
        }
    }

    /// The syndrome bits a decoder in `mode` consumes.
    pub fn restrict_syndrome(
        &self,
        syndrome: &Syndrome,
        mode: DecodeMode,
    ) -> Result<Syndrome, CodeError> {
        if syndrome.len() != self.n_generators() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_generators(),
                found: syndrome.len(),
            }
            .into());
        }
        match mode {
            DecodeMode::Joint => Ok(syndrome.clone()),
            DecodeMode::ZOnly => {
                let css = self.css.as_ref().ok_or(CodeError::NotCss)?;
                let bits: Vec<bool> = css.z_rows.iter().map(|&r| syndrome.get(r)).collect();
                Ok(BitVec::from_bools(&bits))
            }
        }
    }

    /// The error bits a decoder in `mode` predicts.
    pub fn restrict_error(&self, error: &ErrorVector, mode: DecodeMode) -> ErrorVector {
        match mode {
            DecodeMode::Joint => error.clone(),
            DecodeMode::ZOnly => error.slice(0, self.n),
        }
    }

    /// Embeds a mode-restricted prediction back into a full `2N` error.
    pub fn lift_error(&self, part: &BitVec, mode: DecodeMode) -> ErrorVector {
        match mode {
            DecodeMode::Joint => part.clone(),
            DecodeMode::ZOnly => part.concat(&BitVec::zeros(self.n)),
        }
    }

    /// The Tanner-graph view a sampler works against in `mode`.
    pub fn parity_system(&self, mode: DecodeMode) -> Result<ParitySystem, CodeError> {
        let n = self.n;
        match mode {
            DecodeMode::Joint => {
                let neighborhoods = self
                    .syndrome_matrix
                    .rows()
                    .iter()
                    .map(|row| {
                        if self.css.is_some() {
                            row.iter_ones().collect()
                        } else {
                            // both sectors of every qubit in the generator's support
                            let mut qubits: Vec<usize> = row.iter_ones().map(|i| i % n).collect();
                            qubits.sort_unstable();
                            qubits.dedup();
                            let mut bits: Vec<usize> = qubits.to_vec();
                            bits.extend(qubits.iter().map(|q| q + n));
                            bits
                        }
                    })
                    .collect();
                Ok(ParitySystem {
                    checks: self.syndrome_matrix.clone(),
                    neighborhoods,
                })
            }
            DecodeMode::ZOnly => {
                let css = self.css.as_ref().ok_or(CodeError::NotCss)?;
                let rows: Vec<BitVec> = css
                    .z_rows
                    .iter()
                    .map(|&r| self.checks.row(r).slice(n, 2 * n))
                    .collect();
                let neighborhoods = rows.iter().map(|r| r.iter_ones().collect()).collect();
                Ok(ParitySystem {
                    checks: BitMatrix::from_rows(n, rows)?,
                    neighborhoods,
                })
            }
        }
    }
}

fn detect_css(n: usize, rows: &[BitVec]) -> Option<CssSplit> {
    let mut split = CssSplit {
        z_rows: Vec::new(),
        x_rows: Vec::new(),
    };
    for (i, row) in rows.iter().enumerate() {
        let has_x = row.iter_ones().any(|b| b < n);
        let has_z = row.iter_ones().any(|b| b >= n);
        match (has_x, has_z) {
            (true, true) => return None,
            (true, false) => split.x_rows.push(i),
            // an all-zero row is harmless in either block
            (false, _) => split.z_rows.push(i),
        }
    }
    Some(split)
}

/// Linear constraints `checks · e = s` over some set of error bits, with the
/// bits each check touches.
#[derive(Debug, Clone)]
pub struct ParitySystem {
    checks: BitMatrix,
    neighborhoods: Vec<Vec<usize>>,
}

impl ParitySystem {
    pub fn n_checks(&self) -> usize {
        self.checks.nrows()
    }

    pub fn n_bits(&self) -> usize {
        self.checks.ncols()
    }

    pub fn checks(&self) -> &BitMatrix {
        &self.checks
    }

    /// Error-bit coordinates whose flip toggles check `i`.
    pub fn neighborhood(&self, check: usize) -> &[usize] {
        &self.neighborhoods[check]
    }

    pub fn syndrome(&self, error: &BitVec) -> Result<BitVec, Gf2Error> {
        self.checks.matvec(error)
    }

    #[inline]
    pub fn syndrome_into(&self, error: &BitVec, out: &mut BitVec) {
        self.checks.matvec_into(error, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(code: &StabilizerCode, bit: usize) -> BitVec {
        BitVec::from_indices(2 * code.n_qubits(), &[bit])
    }

    #[test]
    fn toric_nine_matches_network_widths() {
        let code = build_toric(9).unwrap();
        assert_eq!(code.n_qubits(), 162);
        assert_eq!(code.n_generators(), 162);
        assert_eq!(code.input_width(DecodeMode::Joint).unwrap(), 162);
        assert_eq!(code.output_width(DecodeMode::Joint), 324);
    }

    #[test]
    fn toric_three_rank_and_k() {
        let code = build_toric(3).unwrap();
        assert_eq!(code.n_qubits(), 18);
        assert_eq!(code.checks().rank(), 16);
        assert_eq!(code.n_logical(), 2);
        code.validate().unwrap();
    }

    #[test]
    fn toric_two_incidence_counts() {
        let code = build_toric(2).unwrap();
        let n = code.n_qubits();
        assert_eq!(n, 8);
        let css = code.css_split().unwrap();
        for q in 0..n {
            let in_plaq = css.z_rows.iter().filter(|&&r| code.checks().get(r, n + q)).count();
            let in_star = css.x_rows.iter().filter(|&&r| code.checks().get(r, q)).count();
            assert_eq!((in_plaq, in_star), (2, 2), "qubit {q}");
        }
    }

    #[test]
    fn single_errors_light_up_two_checks_per_sector() {
        let code = build_toric(3).unwrap();
        let n = code.n_qubits();
        let css = code.css_split().unwrap().clone();
        for q in 0..n {
            let s = code.syndrome(&single(&code, q)).unwrap();
            let plaq = css.z_rows.iter().filter(|&&r| s.get(r)).count();
            let star = css.x_rows.iter().filter(|&&r| s.get(r)).count();
            assert_eq!((plaq, star), (2, 0), "X on {q}");

            let y = BitVec::from_indices(2 * n, &[q, n + q]);
            let s = code.syndrome(&y).unwrap();
            let plaq = css.z_rows.iter().filter(|&&r| s.get(r)).count();
            let star = css.x_rows.iter().filter(|&&r| s.get(r)).count();
            assert_eq!((plaq, star), (2, 2), "Y on {q}");
        }
        assert!(code.syndrome(&BitVec::zeros(2 * n)).unwrap().is_zero());
    }

    #[test]
    fn syndrome_rejects_wrong_length() {
        let code = build_toric(2).unwrap();
        assert!(matches!(
            code.syndrome(&BitVec::zeros(5)),
            Err(CodeError::Dimension(_))
        ));
    }

    #[test]
    fn logical_class_examples() {
        let code = build_toric(3).unwrap();
        let n = code.n_qubits();
        assert!(code.logical_class(&BitVec::zeros(2 * n)).unwrap().is_trivial());
        for row in code.checks().rows() {
            assert!(code.logical_class(row).unwrap().is_trivial());
        }
        let class = code.logical_class(&code.logicals()[0]).unwrap();
        // X̄₁ anticommutes with Z̄₁ only
        assert_eq!(class.bits, "0100".parse().unwrap());
        assert!(matches!(
            code.logical_class(&single(&code, 0)),
            Err(CodeError::NonzeroSyndrome)
        ));
    }

    #[test]
    fn toric_invariants_for_all_small_sizes() {
        for l in 2..=9 {
            let code = build_toric(l).unwrap();
            code.validate().unwrap();
            assert_eq!(code.checks().rank(), 2 * l * l - 2);
            assert!(code.checks().rows().iter().all(|r| r.count_ones() == 4));
            let css = code.css_split().unwrap();
            for block in [&css.z_rows, &css.x_rows] {
                let mut acc = BitVec::zeros(2 * code.n_qubits());
                for &r in block.iter() {
                    acc.xor_with(code.checks().row(r));
                }
                assert!(acc.is_zero(), "product of a generator block is trivial");
            }
        }
    }

    #[test]
    fn new_detects_css_and_rejects_bad_codes() {
        let toric = build_toric(2).unwrap();
        let rebuilt = StabilizerCode::new(
            toric.n_qubits(),
            2,
            toric.checks().rows().to_vec(),
            toric.logicals().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, toric);
        assert!(rebuilt.css_split().is_some());

        // X and Z on the same single qubit
        let rows = vec!["10".parse().unwrap(), "01".parse().unwrap()];
        assert!(matches!(
            StabilizerCode::new(1, 0, rows, vec![]),
            Err(CodeError::NonCommuting(0, 1))
        ));
        let rows = vec!["1100".parse().unwrap()];
        assert!(matches!(
            StabilizerCode::new(2, 0, rows, vec![]),
            Err(CodeError::RankMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn z_only_parity_system_matches_plaquettes() {
        let code = build_toric(3).unwrap();
        let n = code.n_qubits();
        let sys = code.parity_system(DecodeMode::ZOnly).unwrap();
        assert_eq!((sys.n_checks(), sys.n_bits()), (9, n));
        for q in 0..n {
            let full = code.syndrome(&single(&code, q)).unwrap();
            let part = sys.syndrome(&BitVec::from_indices(n, &[q])).unwrap();
            assert_eq!(code.restrict_syndrome(&full, DecodeMode::ZOnly).unwrap(), part);
        }
    }

    fn arb_error(n2: usize) -> impl Strategy<Value = BitVec> {
        proptest::collection::vec(any::<bool>(), n2).prop_map(|b| BitVec::from_bools(&b))
    }

    proptest! {
        #[test]
        fn syndrome_is_linear((l, a, b) in (2usize..7).prop_flat_map(|l| {
            (Just(l), arb_error(4 * l * l), arb_error(4 * l * l))
        })) {
            let code = build_toric(l).unwrap();
            let lhs = code.syndrome(&(&a ^ &b)).unwrap();
            let rhs = &code.syndrome(&a).unwrap() ^ &code.syndrome(&b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn joint_neighborhoods_toggle_their_check((l, bit) in (2usize..6).prop_flat_map(|l| {
            (Just(l), 0..4 * l * l)
        })) {
            let code = build_toric(l).unwrap();
            let sys = code.parity_system(DecodeMode::Joint).unwrap();
            let s = sys.syndrome(&BitVec::from_indices(4 * l * l, &[bit])).unwrap();
            for check in 0..sys.n_checks() {
                prop_assert_eq!(s.get(check), sys.neighborhood(check).contains(&bit));
            }
        }
    }
}
