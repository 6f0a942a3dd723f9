//! Binary parity-check matrices and GF(2) syndrome computation.
//!
//! A code is described by an `m x n` binary matrix `H`: each row is a single
//! parity checksum over the bit positions where the row has a one, and a
//! binary vector is a codeword exactly when every checksum is satisfied,
//! i.e. when it lies in the kernel of `H` over GF(2).
//!
//! [`ParityMatrix`] keeps three views of the same matrix in sync: a dense
//! 0/1 grid (the map-reduce decoder masks whole rows and columns with it),
//! per-row adjacency (the bit positions each check constrains) and
//! per-column adjacency (the checks each bit participates in).

use thiserror::Error;

pub mod alist;
pub mod qc;

/// Errors from parity-matrix construction and syndrome computation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParityError {
    #[error("matrix dimensions {checks}x{bits} are degenerate")]
    InvalidDimensions { checks: usize, bits: usize },
    #[error("row {row}: bit index {index} outside valid range 1..={bits}")]
    IndexOutOfRange {
        row: usize,
        index: usize,
        bits: usize,
    },
    #[error("row {row}: bit index {index} listed twice")]
    DuplicateIndex { row: usize, index: usize },
    #[error("row {row} has degree {degree}, need at least 2")]
    RowDegreeTooSmall { row: usize, degree: usize },
    #[error("vector length {got} does not match bit count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dense data has {got} entries, expected {expected}")]
    DataSize { expected: usize, got: usize },
}

/// Binary parity-check matrix with precomputed row and column adjacency.
///
/// Rows are check nodes, columns are bit nodes. Internally everything is
/// 0-based; the alist file format converts to and from its 1-based indices
/// at the I/O boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityMatrix {
    num_checks: usize,
    num_bits: usize,
    /// Row-major dense 0/1 grid.
    entries: Vec<u8>,
    /// For each row i, the ascending bit indices j with H(i,j)=1.
    row_adj: Vec<Vec<usize>>,
    /// For each column j, the ascending check indices i with H(i,j)=1.
    col_adj: Vec<Vec<usize>>,
    min_row_degree: usize,
}

impl ParityMatrix {
    /// Builds a matrix from parity checksums written the conventional way:
    /// one set of 1-based bit indices per check. Every check must constrain
    /// at least two bits.
    pub fn from_index_sets(sets: &[Vec<usize>], num_bits: usize) -> Result<Self, ParityError> {
        let mut supports = Vec::with_capacity(sets.len());
        for (row, set) in sets.iter().enumerate() {
            let mut support = Vec::with_capacity(set.len());
            for &index in set {
                if index < 1 || index > num_bits {
                    return Err(ParityError::IndexOutOfRange {
                        row,
                        index,
                        bits: num_bits,
                    });
                }
                support.push(index - 1);
            }
            supports.push(support);
        }
        Self::build(supports, num_bits, true)
    }

    /// Builds a matrix from 0-based per-row supports.
    pub fn from_row_supports(
        supports: Vec<Vec<usize>>,
        num_bits: usize,
    ) -> Result<Self, ParityError> {
        Self::build(supports, num_bits, true)
    }

    /// Builds a matrix from a dense row-major 0/1 grid.
    pub fn from_dense(
        num_checks: usize,
        num_bits: usize,
        data: &[u8],
    ) -> Result<Self, ParityError> {
        if data.len() != num_checks * num_bits {
            return Err(ParityError::DataSize {
                expected: num_checks * num_bits,
                got: data.len(),
            });
        }
        let supports = (0..num_checks)
            .map(|i| {
                (0..num_bits)
                    .filter(|&j| data[i * num_bits + j] != 0)
                    .collect()
            })
            .collect();
        Self::build(supports, num_bits, true)
    }

    /// As [`from_row_supports`](Self::from_row_supports) but keeps rows of
    /// degree 0 or 1. The decoders refuse such matrices; this exists so
    /// degenerate files can still be inspected and reserialized.
    pub(crate) fn from_row_supports_any_degree(
        supports: Vec<Vec<usize>>,
        num_bits: usize,
    ) -> Result<Self, ParityError> {
        Self::build(supports, num_bits, false)
    }

    fn build(
        mut supports: Vec<Vec<usize>>,
        num_bits: usize,
        enforce_degree: bool,
    ) -> Result<Self, ParityError> {
        let num_checks = supports.len();
        if num_checks == 0 || num_bits == 0 {
            return Err(ParityError::InvalidDimensions {
                checks: num_checks,
                bits: num_bits,
            });
        }
        let mut entries = vec![0u8; num_checks * num_bits];
        let mut col_adj = vec![Vec::new(); num_bits];
        let mut min_row_degree = usize::MAX;
        for (row, support) in supports.iter_mut().enumerate() {
            support.sort_unstable();
            for pair in support.windows(2) {
                if pair[0] == pair[1] {
                    return Err(ParityError::DuplicateIndex {
                        row,
                        index: pair[0],
                    });
                }
            }
            if let Some(&last) = support.last() {
                if last >= num_bits {
                    return Err(ParityError::IndexOutOfRange {
                        row,
                        index: last,
                        bits: num_bits,
                    });
                }
            }
            if enforce_degree && support.len() < 2 {
                return Err(ParityError::RowDegreeTooSmall {
                    row,
                    degree: support.len(),
                });
            }
            min_row_degree = min_row_degree.min(support.len());
            for &col in support.iter() {
                entries[row * num_bits + col] = 1;
                col_adj[col].push(row);
            }
        }
        Ok(Self {
            num_checks,
            num_bits,
            entries,
            row_adj: supports,
            col_adj,
            min_row_degree,
        })
    }

    /// Number of check nodes (rows), `m`.
    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    /// Number of bit nodes (columns), `n`.
    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    /// True when `H(i,j) = 1`.
    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.entries[row * self.num_bits + col] != 0
    }

    /// Dense 0/1 slice of row `i`.
    pub fn row_mask(&self, row: usize) -> &[u8] {
        &self.entries[row * self.num_bits..(row + 1) * self.num_bits]
    }

    /// Ascending bit indices constrained by check `i` (the set `N_i`).
    pub fn row_support(&self, row: usize) -> &[usize] {
        &self.row_adj[row]
    }

    /// Ascending check indices involving bit `j` (the set `M_j`).
    pub fn col_support(&self, col: usize) -> &[usize] {
        &self.col_adj[col]
    }

    pub fn min_row_degree(&self) -> usize {
        self.min_row_degree
    }

    pub fn max_row_degree(&self) -> usize {
        self.row_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        self.col_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total number of ones in the matrix.
    pub fn ones(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    /// Design rate `(n - m) / n`, assuming full row rank.
    pub fn design_rate(&self) -> f64 {
        (self.num_bits as f64 - self.num_checks as f64) / self.num_bits as f64
    }

    /// Computes `H * b` over GF(2): bit `i` of the syndrome is the XOR of
    /// `b(j)` over the support of check `i`.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Syndrome, ParityError> {
        if bits.len() != self.num_bits {
            return Err(ParityError::LengthMismatch {
                expected: self.num_bits,
                got: bits.len(),
            });
        }
        let syndrome = self
            .row_adj
            .iter()
            .map(|support| support.iter().fold(0u8, |acc, &j| acc ^ (bits[j] & 1)))
            .collect();
        Ok(Syndrome { bits: syndrome })
    }

    /// True when `b` lies in the kernel of `H` over GF(2).
    pub fn is_codeword(&self, bits: &[u8]) -> Result<bool, ParityError> {
        Ok(self.syndrome(bits)?.is_zero())
    }
}

/// Result of a GF(2) parity product, one bit per check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    bits: Vec<u8>,
}

impl Syndrome {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// All-zero syndrome, i.e. every checksum satisfied.
    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The five checks used throughout the tests in this crate, written as
    /// 1-based index sets over 10 bits.
    pub(crate) fn five_check_sets() -> Vec<Vec<usize>> {
        vec![
            vec![1, 2, 3, 6, 7, 10],
            vec![1, 3, 5, 6, 8, 9],
            vec![3, 4, 5, 7, 9, 10],
            vec![2, 4, 5, 6, 8, 10],
            vec![1, 2, 4, 7, 8, 9],
        ]
    }

    pub(crate) fn five_check_matrix() -> ParityMatrix {
        ParityMatrix::from_index_sets(&five_check_sets(), 10).unwrap()
    }

    /// Brute-force dense GF(2) product, the independent route for syndrome
    /// checks.
    fn dense_syndrome(h: &ParityMatrix, b: &[u8]) -> Vec<u8> {
        (0..h.num_checks())
            .map(|i| {
                let mut acc = 0u32;
                for (j, &bit) in b.iter().enumerate() {
                    acc += (h.entry(i, j) as u32) * (bit as u32);
                }
                (acc % 2) as u8
            })
            .collect()
    }

    #[test]
    fn first_check_row_matches_indicator_vector() {
        let h = five_check_matrix();
        assert_eq!(h.row_mask(0), &[1, 1, 1, 0, 0, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn minimal_two_bit_check() {
        let h = ParityMatrix::from_index_sets(&[vec![1, 2]], 2).unwrap();
        assert_eq!((h.num_checks(), h.num_bits()), (1, 2));
        assert_eq!(h.row_mask(0), &[1, 1]);
    }

    #[test]
    fn column_adjacency_recomputed_from_sets() {
        // Membership of bit 3 across the five sets: rows 1, 2, 3 (1-based).
        let sets = five_check_sets();
        let expected: Vec<usize> = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(&3))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(expected, vec![0, 1, 2]);
        let h = five_check_matrix();
        assert_eq!(h.col_support(2), expected.as_slice());
    }

    #[test]
    fn adjacency_views_are_consistent() {
        let h = five_check_matrix();
        for i in 0..h.num_checks() {
            for j in 0..h.num_bits() {
                let in_row = h.row_support(i).contains(&j);
                let in_col = h.col_support(j).contains(&i);
                assert_eq!(in_row, h.entry(i, j));
                assert_eq!(in_col, h.entry(i, j));
            }
            assert!(h.row_support(i).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_index_out_of_range() {
        let err = ParityMatrix::from_index_sets(&[vec![1, 11]], 10).unwrap_err();
        assert_eq!(
            err,
            ParityError::IndexOutOfRange {
                row: 0,
                index: 11,
                bits: 10
            }
        );
        // 0 is out of range too: sets are 1-based.
        assert!(ParityMatrix::from_index_sets(&[vec![0, 1]], 10).is_err());
    }

    #[test]
    fn rejects_degree_one_row() {
        let err = ParityMatrix::from_index_sets(&[vec![4]], 10).unwrap_err();
        assert_eq!(err, ParityError::RowDegreeTooSmall { row: 0, degree: 1 });
    }

    #[test]
    fn rejects_duplicate_index() {
        let err = ParityMatrix::from_index_sets(&[vec![2, 2, 3]], 10).unwrap_err();
        assert_eq!(err, ParityError::DuplicateIndex { row: 0, index: 1 });
    }

    #[test]
    fn syndrome_of_zero_vector_is_zero() {
        let h = five_check_matrix();
        assert!(h.syndrome(&[0; 10]).unwrap().is_zero());
        assert!(h.is_codeword(&[0; 10]).unwrap());
    }

    #[test]
    fn syndrome_of_singleton_vectors() {
        let h = five_check_matrix();
        // Bit 1 appears in checks 1, 2, 5.
        let mut e1 = [0u8; 10];
        e1[0] = 1;
        assert_eq!(h.syndrome(&e1).unwrap().bits(), &[1, 1, 0, 0, 1]);
        assert!(!h.is_codeword(&e1).unwrap());
        // Bit 3 appears in checks 1, 2, 3.
        let mut e3 = [0u8; 10];
        e3[2] = 1;
        assert_eq!(h.syndrome(&e3).unwrap().bits(), &[1, 1, 1, 0, 0]);
    }

    #[test]
    fn syndrome_matches_dense_product_exhaustively() {
        // Rank-deficient toy code: row 3 = row 1 XOR row 2.
        let h = ParityMatrix::from_dense(
            3,
            6,
            &[
                1, 1, 0, 0, 1, 0, //
                0, 1, 1, 1, 0, 0, //
                1, 0, 1, 1, 1, 0,
            ],
        )
        .unwrap();
        let mut kernel = 0usize;
        for v in 0..1usize << 6 {
            let b: Vec<u8> = (0..6).map(|j| ((v >> j) & 1) as u8).collect();
            let dense = dense_syndrome(&h, &b);
            assert_eq!(h.syndrome(&b).unwrap().bits(), dense.as_slice());
            if dense.iter().all(|&x| x == 0) {
                assert!(h.is_codeword(&b).unwrap());
                kernel += 1;
            } else {
                assert!(!h.is_codeword(&b).unwrap());
            }
        }
        // Rank 2 over 6 bits: 2^(6-2) kernel vectors.
        assert_eq!(kernel, 16);
    }

    #[test]
    fn syndrome_length_mismatch() {
        let h = five_check_matrix();
        assert_eq!(
            h.syndrome(&[0; 9]).unwrap_err(),
            ParityError::LengthMismatch {
                expected: 10,
                got: 9
            }
        );
    }

    #[test]
    fn dense_and_set_construction_agree() {
        let h = five_check_matrix();
        let dense: Vec<u8> = (0..5)
            .flat_map(|i| h.row_mask(i).to_vec())
            .collect();
        let h2 = ParityMatrix::from_dense(5, 10, &dense).unwrap();
        assert_eq!(h, h2);
    }
}
