//! Quasi-cyclic code specifications: compact shift tables that expand into
//! large parity-check matrices built from circulant blocks.
//!
//! A spec is a `rowBlocks x colBlocks` grid over circulants of size `Z`.
//! Each cell is either empty or a set of cyclic shift offsets; a shift `s`
//! places ones at `(r, (r+s) mod Z)` within the block, so shift 0 is the
//! `Z x Z` identity. A cell with several shifts superimposes the circulants.
//!
//! Text format: line 1 is `rowBlocks colBlocks Z`; then one line per block
//! row with `colBlocks` whitespace-separated cells, each `-` (empty) or
//! comma-separated shifts, e.g. `17,402`.

use super::{ParityError, ParityMatrix};
use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

/// Errors from QC spec parsing, validation, and expansion.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum QcError {
    #[error("line {line}: expected {expected}, found {found}")]
    Malformed {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("spec truncated: expected {expected} block rows, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("block ({row},{col}): shift {shift} outside [0, {block_size})")]
    ShiftOutOfRange {
        row: usize,
        col: usize,
        shift: usize,
        block_size: usize,
    },
    #[error("block ({row},{col}): shift {shift} listed twice")]
    DuplicateShift { row: usize, col: usize, shift: usize },
    #[error("block grid {rows}x{cols} with size {block_size} is degenerate")]
    InvalidGrid {
        rows: usize,
        cols: usize,
        block_size: usize,
    },
    #[error("cannot draw {requested} distinct shifts from [0, {block_size})")]
    TooManyShifts {
        requested: usize,
        block_size: usize,
    },
    #[error(transparent)]
    Matrix(#[from] ParityError),
}

/// Shift table describing a quasi-cyclic parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcSpec {
    row_blocks: usize,
    col_blocks: usize,
    block_size: usize,
    /// Row-major grid; each cell holds ascending distinct shifts, empty
    /// for a zero block.
    shifts: Vec<Vec<usize>>,
}

impl QcSpec {
    /// Builds a spec from a row-major grid of shift lists. Shifts must lie
    /// in `[0, blockSize)` and be distinct within each cell.
    pub fn new(
        row_blocks: usize,
        col_blocks: usize,
        block_size: usize,
        shifts: Vec<Vec<usize>>,
    ) -> Result<Self, QcError> {
        if row_blocks == 0 || col_blocks == 0 || block_size == 0 {
            return Err(QcError::InvalidGrid {
                rows: row_blocks,
                cols: col_blocks,
                block_size,
            });
        }
        assert_eq!(
            shifts.len(),
            row_blocks * col_blocks,
            "shift grid must be row-major rowBlocks*colBlocks"
        );
        let mut spec = Self {
            row_blocks,
            col_blocks,
            block_size,
            shifts,
        };
        for cell in spec.shifts.iter_mut() {
            cell.sort_unstable();
        }
        for a in 0..row_blocks {
            for b in 0..col_blocks {
                let cell = &spec.shifts[a * col_blocks + b];
                for pair in cell.windows(2) {
                    if pair[0] == pair[1] {
                        return Err(QcError::DuplicateShift {
                            row: a,
                            col: b,
                            shift: pair[0],
                        });
                    }
                }
                if let Some(&last) = cell.last() {
                    if last >= block_size {
                        return Err(QcError::ShiftOutOfRange {
                            row: a,
                            col: b,
                            shift: last,
                            block_size,
                        });
                    }
                }
            }
        }
        Ok(spec)
    }

    /// Draws a spec with `shifts_per_block` distinct uniform shifts in every
    /// block. With 2 shifts per block on a 2x16 grid this produces codes
    /// shaped like the benchmark code: uniform column degree
    /// `rowBlocks * shiftsPerBlock` and row degree `colBlocks * shiftsPerBlock`.
    pub fn random<R: Rng + ?Sized>(
        row_blocks: usize,
        col_blocks: usize,
        block_size: usize,
        shifts_per_block: usize,
        rng: &mut R,
    ) -> Result<Self, QcError> {
        if shifts_per_block > block_size {
            return Err(QcError::TooManyShifts {
                requested: shifts_per_block,
                block_size,
            });
        }
        let shifts = (0..row_blocks * col_blocks)
            .map(|_| {
                let mut cell = sample(rng, block_size, shifts_per_block).into_vec();
                cell.sort_unstable();
                cell
            })
            .collect();
        Self::new(row_blocks, col_blocks, block_size, shifts)
    }

    pub fn row_blocks(&self) -> usize {
        self.row_blocks
    }

    pub fn col_blocks(&self) -> usize {
        self.col_blocks
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Ascending shifts of block `(row, col)`, empty slice for a zero block.
    pub fn block(&self, row: usize, col: usize) -> &[usize] {
        &self.shifts[row * self.col_blocks + col]
    }

    /// Number of ones the expanded matrix will contain: `Z` per shift.
    pub fn expanded_ones(&self) -> usize {
        self.block_size * self.shifts.iter().map(Vec::len).sum::<usize>()
    }

    /// Expands the shift table into the full parity-check matrix: shift `s`
    /// of block `(a, b)` sets `H(a*Z + r, b*Z + (r+s) mod Z)` for all
    /// `r in [0, Z)`.
    ///
    /// A spec with a single shift per block row expands to rows of degree 1
    /// (a lone circulant is a permutation matrix). Such matrices are legal
    /// here and in the file formats; the decoders reject them at decode
    /// time, where the leave-one-out minimum would be undefined.
    pub fn expand(&self) -> Result<ParityMatrix, QcError> {
        let z = self.block_size;
        let num_bits = self.col_blocks * z;
        let mut supports = vec![Vec::new(); self.row_blocks * z];
        for a in 0..self.row_blocks {
            for b in 0..self.col_blocks {
                for &s in self.block(a, b) {
                    for r in 0..z {
                        supports[a * z + r].push(b * z + (r + s) % z);
                    }
                }
            }
        }
        Ok(ParityMatrix::from_row_supports_any_degree(
            supports, num_bits,
        )?)
    }

    /// Parses the plain-text shift-table format.
    pub fn parse(text: &str) -> Result<Self, QcError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(idx, line)| (idx + 1, line))
            .filter(|(_, line)| !line.trim().is_empty());
        let (header_line, header) = lines.next().ok_or(QcError::Truncated {
            expected: 1,
            found: 0,
        })?;
        let fields: Vec<_> = header.split_whitespace().collect();
        let dims: Option<(usize, usize, usize)> = match fields.as_slice() {
            [a, b, z] => a
                .parse()
                .ok()
                .zip(b.parse().ok())
                .zip(z.parse().ok())
                .map(|((a, b), z)| (a, b, z)),
            _ => None,
        };
        let (row_blocks, col_blocks, block_size) = dims.ok_or_else(|| QcError::Malformed {
            line: header_line,
            expected: "header `rowBlocks colBlocks blockSize`",
            found: header.trim().to_string(),
        })?;

        let mut shifts = Vec::with_capacity(row_blocks * col_blocks);
        for block_row in 0..row_blocks {
            let (line, raw) = lines.next().ok_or(QcError::Truncated {
                expected: row_blocks,
                found: block_row,
            })?;
            let cells: Vec<_> = raw.split_whitespace().collect();
            if cells.len() != col_blocks {
                return Err(QcError::Malformed {
                    line,
                    expected: "one cell per block column",
                    found: raw.trim().to_string(),
                });
            }
            for cell in cells {
                if cell == "-" {
                    shifts.push(Vec::new());
                    continue;
                }
                let parsed: Option<Vec<usize>> =
                    cell.split(',').map(|f| f.parse().ok()).collect();
                match parsed {
                    Some(list) if !list.is_empty() => shifts.push(list),
                    _ => {
                        return Err(QcError::Malformed {
                            line,
                            expected: "`-` or comma-separated shifts",
                            found: cell.to_string(),
                        })
                    }
                }
            }
        }
        Self::new(row_blocks, col_blocks, block_size, shifts)
    }

    /// Serializes to the canonical text form: ascending shifts, `-` for
    /// empty blocks, single spaces, LF endings.
    pub fn serialize(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.row_blocks, self.col_blocks, self.block_size
        );
        for a in 0..self.row_blocks {
            for b in 0..self.col_blocks {
                if b > 0 {
                    out.push(' ');
                }
                let cell = self.block(a, b);
                if cell.is_empty() {
                    out.push('-');
                } else {
                    let rendered: Vec<String> =
                        cell.iter().map(|s| s.to_string()).collect();
                    out.push_str(&rendered.join(","));
                }
            }
            out.push('\n');
        }
        out
    }
}
