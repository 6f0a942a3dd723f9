//! Min-Sum decoding as map and reduce passes over dense matrices.
//!
//! Instead of walking adjacency lists edge by edge, this decoder keeps the
//! check-to-bit state in dense `m x n` matrices and runs fixed whole-matrix
//! stages, so the control flow never depends on the contents of the parity
//! matrix:
//!
//! 1. `fan_out` copies the soft vector into every row, masked by H, and
//!    `matrix_minus` subtracts the previous messages:
//!    `lambda(i,j) = s(j)*H(i,j) - eta(i,j)`.
//! 2. `find_minima` reduces each row to four summary values: the smallest
//!    masked magnitude `min0`, its column `min0Location`, the runner-up
//!    `min1`, and the count of strictly negative entries. `sign_reduce`
//!    turns that count's parity into `signParity` in {-1, +1}.
//! 3. `produce_new_matrix` rebuilds the message matrix from the summaries
//!    alone: `eta(i,j) = H(i,j) * sign(lambda(i,j)) * signParity(i) *
//!    (min1 if j = min0Location else min0)`. The leave-one-out minimum of
//!    the per-edge formulation is `min1` exactly at the column that holds
//!    the minimum and `min0` everywhere else, and dividing the full sign
//!    product by one factor is the same as multiplying by it.
//! 4. `add_channel` and `sum_vertical` form `s(j) = r(j) + sum_i eta(i,j)`,
//!    adding rows in ascending order starting from r so the arithmetic
//!    matches the reference decoder's summation order bit for bit.
//! 5. `slicer`, `syndrome_product`, `mod2`, and `is_codeword_check` test
//!    for convergence on a schedule set by `checkEvery`.
//!
//! Every stage's wall-clock time is accumulated in [`StageTimings`].

use std::time::{Duration, Instant};

use super::{sign, slice_bit, DecodeError, DecodeOutcome};
use crate::channel::LlrVector;
use crate::parity::ParityMatrix;

/// Dense row-major real matrix sized like the parity-check matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Dense bit-copy matrix lambda; meaningful only on the support of H,
/// exactly zero elsewhere.
pub type LambdaMatrix = DenseMatrix;

/// Dense check-to-bit message matrix eta; exactly zero off the support
/// of H.
pub type EtaMatrix = DenseMatrix;

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }
}

/// The four per-row reduction values that replace per-edge minimum and
/// sign computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSummary {
    /// Smallest |lambda(i,j)| over the row's support.
    pub min0: f64,
    /// Smallest |lambda(i,j)| over the support excluding `min0_location`.
    pub min1: f64,
    /// Smallest column index attaining `min0`.
    pub min0_location: usize,
    /// Product of sign(lambda(i,j)) over the row with sign(0) = +1,
    /// equivalently -1 to the power of the number of strictly negative
    /// entries; always +1.0 or -1.0.
    pub sign_parity: f64,
}

/// The named pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    FanOut,
    MatrixMinus,
    FindMinima,
    SignReduce,
    ProduceNewMatrix,
    AddChannel,
    SumVertical,
    Slicer,
    SyndromeProduct,
    Mod2,
    IsCodewordCheck,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::FanOut,
        Stage::MatrixMinus,
        Stage::FindMinima,
        Stage::SignReduce,
        Stage::ProduceNewMatrix,
        Stage::AddChannel,
        Stage::SumVertical,
        Stage::Slicer,
        Stage::SyndromeProduct,
        Stage::Mod2,
        Stage::IsCodewordCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::FanOut => "fan_out",
            Stage::MatrixMinus => "matrix_minus",
            Stage::FindMinima => "find_minima",
            Stage::SignReduce => "sign_reduce",
            Stage::ProduceNewMatrix => "produce_new_matrix",
            Stage::AddChannel => "add_channel",
            Stage::SumVertical => "sum_vertical",
            Stage::Slicer => "slicer",
            Stage::SyndromeProduct => "syndrome_product",
            Stage::Mod2 => "mod2",
            Stage::IsCodewordCheck => "is_codeword_check",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Wall-clock time accumulated per pipeline stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageTimings {
    durations: [Duration; 11],
}

impl StageTimings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, stage: Stage, duration: Duration) {
        self.durations[stage.index()] += duration;
    }

    pub fn get(&self, stage: Stage) -> Duration {
        self.durations[stage.index()]
    }

    /// Sum over all stages.
    pub fn total(&self) -> Duration {
        self.durations.iter().sum()
    }

    /// Accumulates another run's timings into this one.
    pub fn merge(&mut self, other: &StageTimings) {
        for stage in Stage::ALL {
            self.durations[stage.index()] += other.durations[stage.index()];
        }
    }

    /// All stages with their accumulated nanoseconds, sorted by descending
    /// time (ties keep pipeline order).
    pub fn table(&self) -> Vec<(&'static str, u128)> {
        let mut rows: Vec<(&'static str, u128)> = Stage::ALL
            .iter()
            .map(|&s| (s.name(), self.get(s).as_nanos()))
            .collect();
        rows.sort_by_key(|&(_, nanos)| std::cmp::Reverse(nanos));
        rows
    }

    /// Two-column text rendering of [`table`](Self::table).
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for (name, nanos) in self.table() {
            out.push_str(&format!("{name:<20} {nanos:>14}\n"));
        }
        out
    }
}

/// Copies `v` into every row of `lambda`, masked by H; with `eta` present,
/// also subtracts it, giving `lambda(i,j) = v(j)*H(i,j) - eta(i,j)`.
pub fn fan_out(
    v: &[f64],
    h: &ParityMatrix,
    eta: Option<&EtaMatrix>,
) -> Result<LambdaMatrix, DecodeError> {
    if v.len() != h.num_bits() {
        return Err(DecodeError::LengthMismatch {
            expected: h.num_bits(),
            got: v.len(),
        });
    }
    let mut lambda = DenseMatrix::zeros(h.num_checks(), h.num_bits());
    for i in 0..h.num_checks() {
        fan_out_row(lambda.row_mut(i), v, h.row_mask(i));
    }
    if let Some(eta) = eta {
        matrix_minus(&mut lambda, eta);
    }
    Ok(lambda)
}

fn fan_out_row(row: &mut [f64], v: &[f64], mask: &[u8]) {
    for ((out, &value), &m) in row.iter_mut().zip(v).zip(mask) {
        *out = value * m as f64;
    }
}

fn matrix_minus(lambda: &mut DenseMatrix, eta: &DenseMatrix) {
    for (l, &e) in lambda.data.iter_mut().zip(eta.data.iter()) {
        *l -= e;
    }
}

/// Reduces every row of `lambda` to its four summary values. Fails on rows
/// of degree < 2, where the runner-up minimum does not exist.
pub fn reduce_rows(
    lambda: &LambdaMatrix,
    h: &ParityMatrix,
) -> Result<Vec<RowSummary>, DecodeError> {
    let mut summaries = Vec::with_capacity(h.num_checks());
    for i in 0..h.num_checks() {
        if h.row_support(i).len() < 2 {
            return Err(DecodeError::RowDegreeTooSmall {
                row: i,
                degree: h.row_support(i).len(),
            });
        }
        let (min0, min1, min0_location, negatives) =
            find_minima_row(lambda.row(i), h.row_mask(i));
        summaries.push(RowSummary {
            min0,
            min1,
            min0_location,
            sign_parity: parity_sign(negatives),
        });
    }
    Ok(summaries)
}

/// One masked pass over a dense row: the two smallest magnitudes, the
/// column of the smallest (first on ties), and the count of strictly
/// negative entries. Off-mask entries are zero and never negative, so the
/// negative count can be taken in the same pass.
fn find_minima_row(row: &[f64], mask: &[u8]) -> (f64, f64, usize, u32) {
    let mut min0 = f64::INFINITY;
    let mut min1 = f64::INFINITY;
    let mut min0_location = 0;
    let mut negatives = 0u32;
    for (j, (&value, &m)) in row.iter().zip(mask).enumerate() {
        if m == 0 {
            continue;
        }
        negatives += (value < 0.0) as u32;
        let magnitude = value.abs();
        if magnitude < min0 {
            min1 = min0;
            min0 = magnitude;
            min0_location = j;
        } else if magnitude < min1 {
            min1 = magnitude;
        }
    }
    (min0, min1, min0_location, negatives)
}

fn parity_sign(negatives: u32) -> f64 {
    if negatives.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Rebuilds the message matrix from the row summaries:
/// `eta(i,j) = H(i,j) * sign(lambda(i,j)) * signParity(i) * m(i,j)` where
/// `m(i,j)` is `min1` at the minimum's column and `min0` elsewhere.
pub fn produce_eta(
    summaries: &[RowSummary],
    lambda: &LambdaMatrix,
    h: &ParityMatrix,
) -> EtaMatrix {
    assert_eq!(summaries.len(), h.num_checks());
    let mut eta = DenseMatrix::zeros(h.num_checks(), h.num_bits());
    for (i, summary) in summaries.iter().enumerate() {
        produce_eta_row(eta.row_mut(i), lambda.row(i), h.row_mask(i), summary);
    }
    eta
}

fn produce_eta_row(out: &mut [f64], lambda: &[f64], mask: &[u8], summary: &RowSummary) {
    for (j, ((e, &l), &m)) in out.iter_mut().zip(lambda).zip(mask).enumerate() {
        if m == 0 {
            *e = 0.0;
        } else {
            let magnitude = if j == summary.min0_location {
                summary.min1
            } else {
                summary.min0
            };
            *e = sign(l) * summary.sign_parity * magnitude;
        }
    }
}

/// Column-wise reduction `s(j) = r(j) + sum_i eta(i,j)`, starting from r
/// and adding rows in ascending order.
pub fn column_sum(eta: &EtaMatrix, r: &[f64]) -> Vec<f64> {
    assert_eq!(eta.cols, r.len());
    let mut s = r.to_vec();
    sum_vertical(&mut s, eta);
    s
}

fn sum_vertical(s: &mut [f64], eta: &DenseMatrix) {
    for i in 0..eta.rows {
        for (acc, &e) in s.iter_mut().zip(eta.row(i)) {
            *acc += e;
        }
    }
}

/// Reusable state for decoding frames against one parity-check matrix.
/// Buffers are allocated once and reused across frames, which matters when
/// a batch decodes thousands of frames against a large matrix.
#[derive(Debug)]
pub struct MapReduceDecoder {
    lambda: DenseMatrix,
    eta: DenseMatrix,
    s: Vec<f64>,
    hard: Vec<u8>,
    summaries: Vec<RowSummary>,
    negatives: Vec<u32>,
    counts: Vec<u32>,
}

impl MapReduceDecoder {
    pub fn for_matrix(h: &ParityMatrix) -> Self {
        let (m, n) = (h.num_checks(), h.num_bits());
        Self {
            lambda: DenseMatrix::zeros(m, n),
            eta: DenseMatrix::zeros(m, n),
            s: vec![0.0; n],
            hard: vec![0; n],
            summaries: Vec::with_capacity(m),
            negatives: vec![0; m],
            counts: vec![0; m],
        }
    }

    /// Decodes one frame; see [`decode_mr`] for the semantics.
    pub fn decode(
        &mut self,
        h: &ParityMatrix,
        r: &LlrVector,
        max_iterations: usize,
        check_every: usize,
    ) -> Result<DecodeOutcome, DecodeError> {
        self.decode_instrumented(h, r, max_iterations, check_every, |_, _| {})
            .map(|(outcome, _)| outcome)
    }

    /// Decodes one frame, returning per-stage wall-clock timings and
    /// invoking `observer(k, s)` after each iteration's column sum.
    pub fn decode_instrumented(
        &mut self,
        h: &ParityMatrix,
        r: &LlrVector,
        max_iterations: usize,
        check_every: usize,
        mut observer: impl FnMut(usize, &[f64]),
    ) -> Result<(DecodeOutcome, StageTimings), DecodeError> {
        if r.len() != h.num_bits() {
            return Err(DecodeError::LengthMismatch {
                expected: h.num_bits(),
                got: r.len(),
            });
        }
        if check_every == 0 {
            return Err(DecodeError::InvalidCheckEvery);
        }
        if h.min_row_degree() < 2 {
            let row = (0..h.num_checks())
                .find(|&i| h.row_support(i).len() < 2)
                .unwrap_or(0);
            return Err(DecodeError::RowDegreeTooSmall {
                row,
                degree: h.row_support(row).len(),
            });
        }
        self.resize(h);

        let mut timings = StageTimings::new();
        let r = r.values();
        let m = h.num_checks();

        // Pre-loop: fan the received values out, and test whether slicing
        // them already yields a codeword.
        time(&mut timings, Stage::FanOut, || {
            for i in 0..m {
                fan_out_row(self.lambda.row_mut(i), r, h.row_mask(i));
            }
        });
        time(&mut timings, Stage::AddChannel, || {
            self.s.copy_from_slice(r);
        });
        let mut is_codeword = self.check_codeword(h, &mut timings);
        if is_codeword {
            return Ok((self.outcome(true, 0), timings));
        }

        // Messages start at zero, so the first fan-out needs no subtraction.
        self.eta.data.fill(0.0);

        let mut k = 0;
        while k < max_iterations {
            k += 1;
            time(&mut timings, Stage::FindMinima, || {
                self.summaries.clear();
                for i in 0..m {
                    let (min0, min1, min0_location, negatives) =
                        find_minima_row(self.lambda.row(i), h.row_mask(i));
                    self.negatives[i] = negatives;
                    self.summaries.push(RowSummary {
                        min0,
                        min1,
                        min0_location,
                        sign_parity: 1.0,
                    });
                }
            });
            time(&mut timings, Stage::SignReduce, || {
                for (summary, &negatives) in
                    self.summaries.iter_mut().zip(self.negatives.iter())
                {
                    summary.sign_parity = parity_sign(negatives);
                }
            });
            time(&mut timings, Stage::ProduceNewMatrix, || {
                for i in 0..m {
                    produce_eta_row(
                        self.eta.row_mut(i),
                        self.lambda.row(i),
                        h.row_mask(i),
                        &self.summaries[i],
                    );
                }
            });
            time(&mut timings, Stage::AddChannel, || {
                self.s.copy_from_slice(r);
            });
            time(&mut timings, Stage::SumVertical, || {
                sum_vertical(&mut self.s, &self.eta);
            });
            observer(k, &self.s);
            if k % check_every == 0 || k == max_iterations {
                is_codeword = self.check_codeword(h, &mut timings);
                if is_codeword {
                    break;
                }
            }
            if k < max_iterations {
                // Prepare the next iteration's lambda = s*H - eta.
                time(&mut timings, Stage::FanOut, || {
                    for i in 0..m {
                        fan_out_row(self.lambda.row_mut(i), &self.s, h.row_mask(i));
                    }
                });
                time(&mut timings, Stage::MatrixMinus, || {
                    matrix_minus(&mut self.lambda, &self.eta);
                });
            }
        }
        // Every exit path has just run check_codeword: the pre-loop check,
        // a mid-loop detection, or the mandatory final-iteration check. So
        // self.hard is always the slice of the returned s.
        Ok((self.outcome(is_codeword, k), timings))
    }

    /// Slices s and tests the syndrome: an integer product via column
    /// adjacency, reduced mod 2, then an all-zero test. Equals the dense
    /// GF(2) product H*b by construction.
    fn check_codeword(&mut self, h: &ParityMatrix, timings: &mut StageTimings) -> bool {
        time(timings, Stage::Slicer, || {
            for (bit, &value) in self.hard.iter_mut().zip(self.s.iter()) {
                *bit = slice_bit(value);
            }
        });
        time(timings, Stage::SyndromeProduct, || {
            self.counts.fill(0);
            for (j, &bit) in self.hard.iter().enumerate() {
                if bit == 1 {
                    for &i in h.col_support(j) {
                        self.counts[i] += 1;
                    }
                }
            }
        });
        time(timings, Stage::Mod2, || {
            for count in self.counts.iter_mut() {
                *count %= 2;
            }
        });
        time(timings, Stage::IsCodewordCheck, || {
            self.counts.iter().all(|&c| c == 0)
        })
    }

    fn outcome(&self, is_codeword: bool, iterations: usize) -> DecodeOutcome {
        DecodeOutcome {
            is_codeword,
            iterations,
            hard: self.hard.clone(),
            soft: LlrVector::new(self.s.clone()).expect("finite inputs stay finite"),
        }
    }

    fn resize(&mut self, h: &ParityMatrix) {
        let (m, n) = (h.num_checks(), h.num_bits());
        if self.lambda.rows != m || self.lambda.cols != n {
            *self = Self::for_matrix(h);
        }
    }
}

fn time<R>(timings: &mut StageTimings, stage: Stage, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let result = f();
    timings.add(stage, start.elapsed());
    result
}

/// Decodes one frame with the map-reduce pipeline. Semantics match
/// [`decode_ref`](super::reference::decode_ref) outcome for outcome: the
/// same pre-loop check, iteration counting, checkEvery schedule, and
/// summation order.
pub fn decode_mr(
    h: &ParityMatrix,
    r: &LlrVector,
    max_iterations: usize,
    check_every: usize,
) -> Result<DecodeOutcome, DecodeError> {
    MapReduceDecoder::for_matrix(h).decode(h, r, max_iterations, check_every)
}

/// As [`decode_mr`], also returning the per-stage timing breakdown.
pub fn decode_mr_timed(
    h: &ParityMatrix,
    r: &LlrVector,
    max_iterations: usize,
    check_every: usize,
) -> Result<(DecodeOutcome, StageTimings), DecodeError> {
    MapReduceDecoder::for_matrix(h).decode_instrumented(h, r, max_iterations, check_every, |_, _| {})
}

/// As [`decode_mr`], invoking `observer(k, s)` after each iteration's
/// column sum, mirroring the reference decoder's observation point.
pub fn decode_mr_observed(
    h: &ParityMatrix,
    r: &LlrVector,
    max_iterations: usize,
    check_every: usize,
    observer: impl FnMut(usize, &[f64]),
) -> Result<DecodeOutcome, DecodeError> {
    MapReduceDecoder::for_matrix(h)
        .decode_instrumented(h, r, max_iterations, check_every, observer)
        .map(|(outcome, _)| outcome)
}
