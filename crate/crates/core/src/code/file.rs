//! Plain-text code files.
//!
//! ```text
//! stabilizer-code v1
//! n=<N> k=<k>
//! <one generator per line, 2N characters over {0,1}, X-part then Z-part>
//!
//! <2k logical lines in the order X̄₁, Z̄₁, …>
//! ```
//!
//! Lines starting with `#` are ignored anywhere in the file.

use std::fmt::Write as _;
use std::path::Path;

use super::{CodeError, StabilizerCode};
use crate::gf2::BitVec;

const HEADER: &str = "stabilizer-code v1";

fn parse_error(line: usize, msg: impl Into<String>) -> CodeError {
    CodeError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_dims(line_no: usize, line: &str) -> Result<(usize, usize), CodeError> {
    let mut n = None;
    let mut k = None;
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_error(line_no, format!("expected key=value, found {token:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid count {value:?}")))?;
        let slot = match key {
            "n" => &mut n,
            "k" => &mut k,
            _ => return Err(parse_error(line_no, format!("unknown key {key:?}"))),
        };
        if slot.replace(value).is_some() {
            return Err(parse_error(line_no, format!("duplicate key {key:?}")));
        }
    }
    match (n, k) {
        (Some(n), Some(k)) if k <= n => Ok((n, k)),
        (Some(_), Some(_)) => Err(parse_error(line_no, "k exceeds n")),
        _ => Err(parse_error(line_no, "expected `n=<N> k=<k>`")),
    }
}

fn parse_row(line_no: usize, line: &str, width: usize) -> Result<BitVec, CodeError> {
    if line.len() != width {
        return Err(parse_error(
            line_no,
            format!("expected {width} bits, found {} characters", line.chars().count()),
        ));
    }
    line.parse()
        .map_err(|e| parse_error(line_no, format!("{e}")))
}

impl StabilizerCode {
    /// Parses and validates a code file.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim_start().starts_with('#'));

        let (no, header) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
        if header.trim() != HEADER {
            return Err(parse_error(no, format!("expected header {HEADER:?}")));
        }
        let (no, dims) = lines
            .next()
            .ok_or_else(|| parse_error(no + 1, "missing dimension line"))?;
        let (n, k) = parse_dims(no, dims)?;
        let width = n.checked_mul(2).ok_or(CodeError::TooLarge(n))?;

        let mut rows = Vec::new();
        let mut logicals = Vec::new();
        let mut in_logicals = false;
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                if in_logicals && !logicals.is_empty() {
                    // trailing blank lines after the logical block
                    continue;
                }
                in_logicals = true;
                continue;
            }
            let row = parse_row(no, line, width)?;
            if in_logicals {
                if logicals.len() == 2 * k {
                    return Err(parse_error(no, "more logical operators than 2k"));
                }
                logicals.push(row);
            } else {
                rows.push(row);
            }
        }
        StabilizerCode::new(n, k, rows, logicals)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "n={} k={}", self.n_qubits(), self.n_logical());
        for row in self.checks().rows() {
            let _ = writeln!(out, "{row}");
        }
        out.push('\n');
        for logical in self.logicals() {
            let _ = writeln!(out, "{logical}");
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CodeError> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CodeError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_toric;

    #[test]
    fn round_trip_toric() {
        let code = build_toric(3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toric3.code");
        code.save(&path).unwrap();
        assert_eq!(StabilizerCode::load(&path).unwrap(), code);
    }

    #[test]
    fn comments_are_ignored() {
        let code = build_toric(2).unwrap();
        let text = code.to_file_string();
        let mut commented = String::from("# toric L=2\n");
        for line in text.lines() {
            commented.push_str(line);
            commented.push_str("\n# note\n");
        }
        assert_eq!(StabilizerCode::parse(&commented).unwrap(), code);
    }

    #[test]
    fn anticommuting_generators_rejected() {
        let text = "stabilizer-code v1\nn=1 k=0\n10\n01\n\n";
        assert!(matches!(
            StabilizerCode::parse(text),
            Err(CodeError::NonCommuting(0, 1))
        ));
    }

    #[test]
    fn rank_deficit_rejected() {
        // two-qubit repetition check only: rank 1 but claims k = 0
        let text = "stabilizer-code v1\nn=2 k=0\n0011\n0011\n\n";
        assert!(matches!(
            StabilizerCode::parse(text),
            Err(CodeError::RankMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn bad_logicals_rejected() {
        // ZZ stabilizer, logicals X̄ = XX, Z̄ = ZI; then a broken pairing
        let ok = "stabilizer-code v1\nn=2 k=1\n0011\n\n1100\n0010\n";
        StabilizerCode::parse(ok).unwrap();
        let not_normalizer = "stabilizer-code v1\nn=2 k=1\n0011\n\n1000\n0010\n";
        assert!(matches!(
            StabilizerCode::parse(not_normalizer),
            Err(CodeError::LogicalNotInNormalizer { logical: 0, row: 0 })
        ));
        let unpaired = "stabilizer-code v1\nn=2 k=1\n0011\n\n1100\n0011\n";
        assert!(matches!(
            StabilizerCode::parse(unpaired),
            Err(CodeError::LogicalPairing(0, 1))
        ));
        let missing = "stabilizer-code v1\nn=2 k=1\n0011\n\n1100\n";
        assert!(matches!(
            StabilizerCode::parse(missing),
            Err(CodeError::LogicalCount { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn malformed_headers_rejected() {
        for text in [
            "",
            "stabilizer-code v2\nn=1 k=0\n",
            "stabilizer-code v1\n",
            "stabilizer-code v1\nn=1\n",
            "stabilizer-code v1\nn=1 k=2\n",
            "stabilizer-code v1\nn=x k=0\n",
            "stabilizer-code v1\nn=1 k=0 m=3\n",
            "stabilizer-code v1\nn=1 k=0\n101\n",
            "stabilizer-code v1\nn=1 k=0\n1x\n",
        ] {
            assert!(
                matches!(StabilizerCode::parse(text), Err(CodeError::Parse { .. })),
                "{text:?}"
            );
        }
    }
}
