//! Kitaev toric code on an `L × L` periodic lattice.
//!
//! Qubits live on edges. Vertex `(row, col)` owns two edges: the horizontal
//! edge to `(row, col + 1)` (`d = 0`) and the vertical edge to `(row + 1, col)`
//! (`d = 1`), so qubit `2·(L·row + col) + d`. Face `(row, col)` is the
//! plaquette whose top-left corner is vertex `(row, col)`.
//!
//! Plaquettes are Z-type and detect X errors; stars are X-type and detect Z
//! errors. Check rows are ordered plaquettes first, then stars.

use super::{CodeError, CssSplit, StabilizerCode};
use crate::gf2::BitVec;

/// Index arithmetic for the toric lattice. All coordinates wrap modulo `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToricLattice {
    size: usize,
}

impl ToricLattice {
    pub fn new(size: usize) -> Result<Self, CodeError> {
        if size < 2 {
            return Err(CodeError::LatticeTooSmall(size));
        }
        Ok(ToricLattice { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.size * self.size
    }

    fn wrap(&self, v: isize) -> usize {
        v.rem_euclid(self.size as isize) as usize
    }

    pub fn horizontal_edge(&self, row: isize, col: isize) -> usize {
        2 * (self.size * self.wrap(row) + self.wrap(col))
    }

    pub fn vertical_edge(&self, row: isize, col: isize) -> usize {
        2 * (self.size * self.wrap(row) + self.wrap(col)) + 1
    }

    /// Flat index of a face or vertex site.
    pub fn site_index(&self, row: usize, col: usize) -> usize {
        self.size * row + col
    }

    pub fn site_coords(&self, index: usize) -> (usize, usize) {
        (index / self.size, index % self.size)
    }

    /// The four edges bounding face `(row, col)`.
    pub fn plaquette_edges(&self, row: usize, col: usize) -> [usize; 4] {
        let (r, c) = (row as isize, col as isize);
        [
            self.horizontal_edge(r, c),
            self.horizontal_edge(r + 1, c),
            self.vertical_edge(r, c),
            self.vertical_edge(r, c + 1),
        ]
    }

    /// The four edges incident to vertex `(row, col)`.
    pub fn star_edges(&self, row: usize, col: usize) -> [usize; 4] {
        let (r, c) = (row as isize, col as isize);
        [
            self.horizontal_edge(r, c),
            self.horizontal_edge(r, c - 1),
            self.vertical_edge(r, c),
            self.vertical_edge(r - 1, c),
        ]
    }

    /// Edge shared by face `(row, col)` and the face one step down
    /// (`down = true`) or right.
    pub fn edge_between_faces(&self, row: usize, col: usize, down: bool) -> usize {
        let (r, c) = (row as isize, col as isize);
        if down {
            self.horizontal_edge(r + 1, c)
        } else {
            self.vertical_edge(r, c + 1)
        }
    }

    /// Edge joining vertex `(row, col)` to the vertex one step down or right.
    pub fn edge_between_vertices(&self, row: usize, col: usize, down: bool) -> usize {
        let (r, c) = (row as isize, col as isize);
        if down {
            self.vertical_edge(r, c)
        } else {
            self.horizontal_edge(r, c)
        }
    }

    /// Builds the stabilizer code for this lattice.
    ///
    /// Logicals are ordered `X̄₁, Z̄₁, X̄₂, Z̄₂`: `X̄₁` acts on the horizontal
    /// edges of column 0, `Z̄₁` on the horizontal edges of row 0, `X̄₂` on the
    /// vertical edges of row 0 and `Z̄₂` on the vertical edges of column 0.
    pub fn build(&self) -> StabilizerCode {
        let l = self.size;
        let n = self.n_qubits();
        let mut rows = Vec::with_capacity(2 * l * l);
        for r in 0..l {
            for c in 0..l {
                let mut row = BitVec::zeros(2 * n);
                for q in self.plaquette_edges(r, c) {
                    row.set(n + q, true);
                }
                rows.push(row);
            }
        }
        for r in 0..l {
            for c in 0..l {
                let mut row = BitVec::zeros(2 * n);
                for q in self.star_edges(r, c) {
                    row.set(q, true);
                }
                rows.push(row);
            }
        }

        let span = |edges: Vec<usize>, z_type: bool| {
            let offset = if z_type { n } else { 0 };
            let idx: Vec<usize> = edges.into_iter().map(|q| q + offset).collect();
            BitVec::from_indices(2 * n, &idx)
        };
        let li = l as isize;
        let logicals = vec![
            span((0..li).map(|r| self.horizontal_edge(r, 0)).collect(), false),
            span((0..li).map(|c| self.horizontal_edge(0, c)).collect(), true),
            span((0..li).map(|c| self.vertical_edge(0, c)).collect(), false),
            span((0..li).map(|r| self.vertical_edge(r, 0)).collect(), true),
        ];

        let css = CssSplit {
            z_rows: (0..l * l).collect(),
            x_rows: (l * l..2 * l * l).collect(),
        };
        StabilizerCode::from_parts(n, 2, rows, logicals, Some(css), Some(l))
    }
}

/// Toric code on an `L × L` torus.
pub fn build_toric(size: usize) -> Result<StabilizerCode, CodeError> {
    Ok(ToricLattice::new(size)?.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_lattice() {
        assert!(matches!(build_toric(1), Err(CodeError::LatticeTooSmall(1))));
        assert!(matches!(build_toric(0), Err(CodeError::LatticeTooSmall(0))));
    }

    #[test]
    fn edge_indexing_matches_layout() {
        let lat = ToricLattice::new(3).unwrap();
        assert_eq!(lat.horizontal_edge(1, 2), 2 * (3 + 2));
        assert_eq!(lat.vertical_edge(1, 2), 2 * (3 + 2) + 1);
        assert_eq!(lat.horizontal_edge(-1, 3), lat.horizontal_edge(2, 0));
    }

    #[test]
    fn adjacent_faces_share_the_reported_edge() {
        let lat = ToricLattice::new(4).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let here = lat.plaquette_edges(r, c);
                let down = lat.plaquette_edges((r + 1) % 4, c);
                let right = lat.plaquette_edges(r, (c + 1) % 4);
                let e = lat.edge_between_faces(r, c, true);
                assert!(here.contains(&e) && down.contains(&e));
                let e = lat.edge_between_faces(r, c, false);
                assert!(here.contains(&e) && right.contains(&e));
                let sv = lat.star_edges(r, c);
                let e = lat.edge_between_vertices(r, c, true);
                assert!(sv.contains(&e) && lat.star_edges((r + 1) % 4, c).contains(&e));
                let e = lat.edge_between_vertices(r, c, false);
                assert!(sv.contains(&e) && lat.star_edges(r, (c + 1) % 4).contains(&e));
            }
        }
    }
}
