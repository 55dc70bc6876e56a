//! Minimum-weight perfect matching of syndrome defects on the torus.
//!
//! Defects of each sector are paired so that the total wraparound Manhattan
//! distance is minimal, and each pair is joined by a geodesic error chain.
//! Up to [`EXACT_MATCHING_LIMIT`] defects per sector the matching is exact
//! (subset dynamic programming over pairings); beyond that a greedy
//! closest-pair matching is used and the result is flagged inexact.

use super::ReferenceError;
use crate::code::{ErrorVector, StabilizerCode, Syndrome, ToricLattice};
use crate::gf2::BitVec;

pub const EXACT_MATCHING_LIMIT: usize = 16;

pub type Site = (usize, usize);

/// Wraparound Manhattan distance between two sites of an `l × l` torus.
pub fn torus_distance(a: Site, b: Site, l: usize) -> usize {
    let wrap = |x: usize, y: usize| {
        let d = x.abs_diff(y);
        d.min(l - d)
    };
    wrap(a.0, b.0) + wrap(a.1, b.1)
}

/// Violated plaquettes or stars of one sector, as lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectSet {
    pub sites: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Index pairs into the defect list.
    pub pairs: Vec<(usize, usize)>,
    pub cost: usize,
    pub exact: bool,
}

/// Minimum-cost perfect matching of `sites` under [`torus_distance`].
pub fn match_defects(sites: &[Site], l: usize) -> Result<Matching, ReferenceError> {
    let n = sites.len();
    if !n.is_multiple_of(2) {
        return Err(ReferenceError::OddDefects(n));
    }
    let dist = |i: usize, j: usize| torus_distance(sites[i], sites[j], l);
    if n <= EXACT_MATCHING_LIMIT {
        exact_matching(n, &dist)
    } else {
        log::debug!("{n} defects exceed the exact matching limit; using greedy matching");
        Ok(greedy_matching(n, &dist))
    }
}

fn exact_matching(n: usize, dist: &dyn Fn(usize, usize) -> usize) -> Result<Matching, ReferenceError> {
    let full = (1usize << n) - 1;
    let mut best = vec![u32::MAX; 1 << n];
    best[0] = 0;

    // cost of perfectly matching the defects in `mask`, always pairing the
    // lowest remaining defect first
    fn solve(mask: usize, best: &mut [u32], dist: &dyn Fn(usize, usize) -> usize) -> u32 {
        if best[mask] != u32::MAX {
            return best[mask];
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut min = u32::MAX;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let c = dist(i, j) as u32 + solve(rest & !(1 << j), best, dist);
            if c < min {
                min = c;
            }
        }
        best[mask] = min;
        min
    }

    let cost = solve(full, &mut best, dist);
    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut bits = rest;
        let target = best[mask];
        loop {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let remaining = rest & !(1 << j);
            if dist(i, j) as u32 + solve(remaining, &mut best, dist) == target {
                pairs.push((i, j));
                mask = remaining;
                break;
            }
        }
    }
    Ok(Matching {
        pairs,
        cost: cost as usize,
        exact: true,
    })
}

fn greedy_matching(n: usize, dist: &dyn Fn(usize, usize) -> usize) -> Matching {
    let mut open: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    let mut cost = 0;
    while !open.is_empty() {
        let mut pick = (usize::MAX, 0, 0);
        for a in 0..open.len() {
            for b in a + 1..open.len() {
                let d = dist(open[a], open[b]);
                if d < pick.0 {
                    pick = (d, a, b);
                }
            }
        }
        let (d, a, b) = pick;
        pairs.push((open[a], open[b]));
        cost += d;
        open.remove(b);
        open.remove(a);
    }
    Matching {
        pairs,
        cost,
        exact: false,
    }
}

/// Which generator block a defect set comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Plaquette (Z-type) defects, corrected with X chains.
    Plaquette,
    /// Star (X-type) defects, corrected with Z chains.
    Star,
}

/// Unit steps along a shortest wraparound path, rows first then columns.
/// Each step is `(row, col, down)` naming the site the step leaves and the
/// axis it moves along, normalized so the edge lookup only needs down/right
/// moves.
fn geodesic_steps(from: Site, to: Site, l: usize) -> Vec<(usize, usize, bool)> {
    let mut steps = Vec::new();
    let (mut r, mut c) = from;
    let dr = (to.0 + l - r) % l;
    if dr <= l - dr {
        for _ in 0..dr {
            steps.push((r, c, true));
            r = (r + 1) % l;
        }
    } else {
        for _ in 0..l - dr {
            r = (r + l - 1) % l;
            steps.push((r, c, true));
        }
    }
    let dc = (to.1 + l - c) % l;
    if dc <= l - dc {
        for _ in 0..dc {
            steps.push((r, c, false));
            c = (c + 1) % l;
        }
    } else {
        for _ in 0..l - dc {
            c = (c + l - 1) % l;
            steps.push((r, c, false));
        }
    }
    steps
}

/// Result of decoding one or both sectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwpmOutcome {
    pub error: ErrorVector,
    /// Matching cost of the plaquette sector. Equals the X-chain weight when
    /// the matching is exact.
    pub x_weight: usize,
    /// Matching cost of the star sector.
    pub z_weight: usize,
    pub exact: bool,
}

fn lattice_of(code: &StabilizerCode) -> Result<ToricLattice, ReferenceError> {
    let size = code.toric_size().ok_or(ReferenceError::NotToric)?;
    Ok(ToricLattice::new(size)?)
}

fn defects(lattice: &ToricLattice, syndrome: &Syndrome, rows: std::ops::Range<usize>) -> DefectSet {
    let offset = rows.start;
    DefectSet {
        sites: rows
            .filter(|&r| syndrome.get(r))
            .map(|r| lattice.site_coords(r - offset))
            .collect(),
    }
}

/// Matches one sector and writes its correction into `error`. Returns the
/// matching cost and exactness.
fn decode_sector(
    lattice: &ToricLattice,
    sites: &DefectSet,
    sector: Sector,
    error: &mut ErrorVector,
) -> Result<(usize, bool), ReferenceError> {
    let l = lattice.size();
    let n = lattice.n_qubits();
    let matching = match_defects(&sites.sites, l)?;
    for &(a, b) in &matching.pairs {
        for (r, c, down) in geodesic_steps(sites.sites[a], sites.sites[b], l) {
            let bit = match sector {
                Sector::Plaquette => lattice.edge_between_faces(r, c, down),
                Sector::Star => n + lattice.edge_between_vertices(r, c, down),
            };
            error.flip(bit);
        }
    }
    Ok((matching.cost, matching.exact))
}

/// Full MWPM decode with per-sector weights.
pub fn mwpm_decode_detailed(
    code: &StabilizerCode,
    syndrome: &Syndrome,
) -> Result<MwpmOutcome, ReferenceError> {
    let lattice = lattice_of(code)?;
    let sites = lattice.size() * lattice.size();
    if syndrome.len() != 2 * sites {
        return Err(ReferenceError::SyndromeWidth {
            expected: 2 * sites,
            found: syndrome.len(),
        });
    }
    let mut error = BitVec::zeros(2 * lattice.n_qubits());
    let plaq = defects(&lattice, syndrome, 0..sites);
    let star = defects(&lattice, syndrome, sites..2 * sites);
    let (x_weight, x_exact) = decode_sector(&lattice, &plaq, Sector::Plaquette, &mut error)?;
    let (z_weight, z_exact) = decode_sector(&lattice, &star, Sector::Star, &mut error)?;
    Ok(MwpmOutcome {
        error,
        x_weight,
        z_weight,
        exact: x_exact && z_exact,
    })
}

pub fn mwpm_decode(code: &StabilizerCode, syndrome: &Syndrome) -> Result<ErrorVector, ReferenceError> {
    Ok(mwpm_decode_detailed(code, syndrome)?.error)
}

/// Decodes only the plaquette block: returns the `N` X-part bits.
pub fn mwpm_decode_plaquettes(
    code: &StabilizerCode,
    plaquette_syndrome: &Syndrome,
) -> Result<BitVec, ReferenceError> {
    let lattice = lattice_of(code)?;
    let sites = lattice.size() * lattice.size();
    if plaquette_syndrome.len() != sites {
        return Err(ReferenceError::SyndromeWidth {
            expected: sites,
            found: plaquette_syndrome.len(),
        });
    }
    let mut error = BitVec::zeros(2 * lattice.n_qubits());
    let plaq = defects(&lattice, plaquette_syndrome, 0..sites);
    decode_sector(&lattice, &plaq, Sector::Plaquette, &mut error)?;
    Ok(error.slice(0, lattice.n_qubits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_toric, DecodeMode};
    use crate::noise::DepolarizationModel;
    use crate::seed::rng_for;

    // Independent oracle: try every pairing recursively.
    fn brute_force_cost(sites: &[Site], l: usize) -> usize {
        if sites.is_empty() {
            return 0;
        }
        (1..sites.len())
            .map(|j| {
                let mut rest = sites.to_vec();
                rest.remove(j);
                rest.remove(0);
                torus_distance(sites[0], sites[j], l) + brute_force_cost(&rest, l)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(torus_distance((2, 3), (2, 3), 5), 0);
        assert_eq!(torus_distance((0, 0), (0, 4), 5), 1);
        assert_eq!(torus_distance((0, 0), (2, 2), 5), 4);
        assert_eq!(torus_distance((0, 0), (3, 3), 5), 4);
    }

    #[test]
    fn exact_matching_matches_brute_force() {
        let mut rng = rng_for(1, &[]);
        use rand::Rng;
        for _ in 0..200 {
            let l = rng.random_range(3..8);
            let count = 2 * rng.random_range(0..5);
            let sites: Vec<Site> = (0..count)
                .map(|_| (rng.random_range(0..l), rng.random_range(0..l)))
                .collect();
            let m = match_defects(&sites, l).unwrap();
            assert!(m.exact);
            assert_eq!(m.cost, brute_force_cost(&sites, l));
            let mut used: Vec<usize> = m.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            used.sort_unstable();
            assert_eq!(used, (0..count).collect::<Vec<_>>());
        }
    }

    #[test]
    fn odd_defects_rejected() {
        assert!(matches!(
            match_defects(&[(0, 0)], 3),
            Err(ReferenceError::OddDefects(1))
        ));
        let code = build_toric(3).unwrap();
        let mut s = BitVec::zeros(18);
        s.set(0, true);
        assert!(matches!(mwpm_decode(&code, &s), Err(ReferenceError::OddDefects(1))));
    }

    #[test]
    fn greedy_beyond_limit_is_flagged() {
        let sites: Vec<Site> = (0..18).map(|i| (i / 6, i % 6)).collect();
        let m = match_defects(&sites, 6).unwrap();
        assert!(!m.exact);
        assert_eq!(m.pairs.len(), 9);
    }

    #[test]
    fn empty_syndrome_gives_zero_error() {
        let code = build_toric(4).unwrap();
        let out = mwpm_decode_detailed(&code, &BitVec::zeros(32)).unwrap();
        assert!(out.error.is_zero());
        assert_eq!((out.x_weight, out.z_weight), (0, 0));
    }

    #[test]
    fn adjacent_plaquettes_are_joined_by_their_shared_edge() {
        let code = build_toric(5).unwrap();
        let n = code.n_qubits();
        for q in 0..n {
            let e = BitVec::from_indices(2 * n, &[q]);
            let s = code.syndrome(&e).unwrap();
            assert_eq!(mwpm_decode(&code, &s).unwrap(), e, "X on {q}");
            let e = BitVec::from_indices(2 * n, &[n + q]);
            let s = code.syndrome(&e).unwrap();
            assert_eq!(mwpm_decode(&code, &s).unwrap(), e, "Z on {q}");
        }
    }

    #[test]
    fn output_reproduces_syndrome_and_weights() {
        let model = DepolarizationModel::new(0.85).unwrap();
        for l in [2, 3, 4, 5, 6] {
            let code = build_toric(l).unwrap();
            let n = code.n_qubits();
            let mut rng = rng_for(2, &[l as u64]);
            for _ in 0..200 {
                let e = model.sample_error(n, &mut rng);
                let s = code.syndrome(&e).unwrap();
                let out = mwpm_decode_detailed(&code, &s).unwrap();
                assert_eq!(code.syndrome(&out.error).unwrap(), s);
                let (wx, wz) = (out.error.slice(0, n).count_ones(), out.error.slice(n, 2 * n).count_ones());
                if out.exact {
                    assert_eq!((wx, wz), (out.x_weight, out.z_weight), "L={l}");
                } else {
                    // greedy chains may overlap and cancel
                    assert!(wx <= out.x_weight && wz <= out.z_weight);
                }
            }
        }
    }

    #[test]
    fn plaquette_only_decode_matches_joint_x_part() {
        let code = build_toric(4).unwrap();
        let n = code.n_qubits();
        let model = DepolarizationModel::new(0.9).unwrap();
        let mut rng = rng_for(3, &[]);
        for _ in 0..100 {
            let e = model.sample_error(n, &mut rng);
            let s = code.syndrome(&e).unwrap();
            let plaq = code.restrict_syndrome(&s, DecodeMode::ZOnly).unwrap();
            let x = mwpm_decode_plaquettes(&code, &plaq).unwrap();
            assert_eq!(x, mwpm_decode(&code, &s).unwrap().slice(0, n));
        }
    }

    #[test]
    fn sector_weights_equal_brute_force_minimum_at_l3() {
        use crate::reference::min_weight_decode;
        let code = build_toric(3).unwrap();
        let n = code.n_qubits();
        let mut rng = rng_for(9, &[]);
        use rand::seq::index::sample;
        for _ in 0..30 {
            // six plaquette defects and up to six star defects
            let mut s = BitVec::zeros(18);
            for i in sample(&mut rng, 9, 6) {
                s.set(i, true);
            }
            for i in sample(&mut rng, 9, 4) {
                s.set(9 + i, true);
            }
            let out = mwpm_decode_detailed(&code, &s).unwrap();
            let min = min_weight_decode(&code, &s, 2 * n).unwrap();
            assert_eq!(out.x_weight, min.slice(0, n).count_ones());
            assert_eq!(out.z_weight, min.slice(n, 2 * n).count_ones());
        }
    }

    #[test]
    fn non_toric_code_rejected() {
        let code = StabilizerCode::parse("stabilizer-code v1\nn=2 k=1\n0011\n\n1100\n0010\n").unwrap();
        assert!(matches!(
            mwpm_decode(&code, &BitVec::zeros(1)),
            Err(ReferenceError::NotToric)
        ));
    }
}
