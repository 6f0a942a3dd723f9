//! Tanner-graph Min-Sum decoder working edge by edge over adjacency lists.
//!
//! Each check node i sends bit node j the message
//!
//! ```text
//! eta(i,j) = min_{k in N_i, k != j} |lambda_k - eta_prev(i,k)|
//!          * prod_{k in N_i, k != j} sign(lambda_k - eta_prev(i,k))
//! ```
//!
//! and each bit node accumulates `lambda_j = r_j + sum over M_j of eta(i,j)`.
//! The per-position minimum and sign product are computed literally by
//! leave-one-out loops, quadratic in the row degree. That is deliberate:
//! this decoder is the oracle the reduction-based decoder is tested
//! against, so it must not share the min0/min1 shortcut it validates.

use super::{sign, slice, DecodeError, DecodeOutcome};
use crate::channel::LlrVector;
use crate::parity::ParityMatrix;

/// Per-edge check-to-bit messages, one sequence per row aligned with that
/// row's support, plus the previous iteration's copy. Both start at zero.
#[derive(Debug, Clone)]
pub struct EdgeMessages {
    current: Vec<Vec<f64>>,
    previous: Vec<Vec<f64>>,
}

impl EdgeMessages {
    /// All-zero messages shaped like the matrix's row adjacency.
    pub fn zeros(h: &ParityMatrix) -> Self {
        let shape: Vec<Vec<f64>> = (0..h.num_checks())
            .map(|i| vec![0.0; h.row_support(i).len()])
            .collect();
        Self {
            current: shape.clone(),
            previous: shape,
        }
    }

    /// Messages sent by check `i` this iteration, aligned with its support.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.current[i]
    }

    /// Messages check `i` sent last iteration.
    pub fn previous_row(&self, i: usize) -> &[f64] {
        &self.previous[i]
    }

    fn set_row(&mut self, i: usize, values: Vec<f64>) {
        self.current[i] = values;
    }

    /// Makes the current messages the previous ones for the next iteration.
    fn advance(&mut self) {
        std::mem::swap(&mut self.current, &mut self.previous);
    }
}

/// One check-node update: position j of the result is the leave-one-out
/// minimum magnitude times the leave-one-out sign product, with
/// sign(0) = +1.
pub fn check_node_update(inputs: &[f64]) -> Result<Vec<f64>, DecodeError> {
    if inputs.len() < 2 {
        return Err(DecodeError::RowDegreeTooSmall {
            row: 0,
            degree: inputs.len(),
        });
    }
    let mut out = Vec::with_capacity(inputs.len());
    for j in 0..inputs.len() {
        let mut min = f64::INFINITY;
        let mut sgn = 1.0;
        for (k, &input) in inputs.iter().enumerate() {
            if k == j {
                continue;
            }
            min = min.min(input.abs());
            sgn *= sign(input);
        }
        out.push(sgn * min);
    }
    Ok(out)
}

/// One bit-node update: the received value plus all incoming check
/// messages, summed left to right (callers pass them in ascending row
/// order so the result is reproducible).
pub fn bit_node_update(r_j: f64, incoming: impl IntoIterator<Item = f64>) -> f64 {
    incoming.into_iter().fold(r_j, |acc, eta| acc + eta)
}

/// Decodes one frame, stopping as soon as the hard decisions form a
/// codeword. The syndrome is tested before the first iteration and then on
/// every iteration divisible by `check_every` as well as on the last one.
pub fn decode_ref(
    h: &ParityMatrix,
    r: &LlrVector,
    max_iterations: usize,
    check_every: usize,
) -> Result<DecodeOutcome, DecodeError> {
    decode_ref_observed(h, r, max_iterations, check_every, |_, _| {})
}

/// As [`decode_ref`], invoking `observer(k, lambda)` after the bit-node
/// updates of every iteration k. Tests use this to compare per-iteration
/// soft values across implementations.
pub fn decode_ref_observed(
    h: &ParityMatrix,
    r: &LlrVector,
    max_iterations: usize,
    check_every: usize,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<DecodeOutcome, DecodeError> {
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

    let r = r.values();
    let mut lambda = r.to_vec();
    let mut hard = slice(&lambda);
    if h.is_codeword(&hard).expect("length checked above") {
        return Ok(DecodeOutcome {
            is_codeword: true,
            iterations: 0,
            hard,
            soft: LlrVector::new(lambda).expect("finite inputs stay finite"),
        });
    }

    // For the ascending-row-order bit update: each column's incoming edges
    // as (row, position of this column in that row's support).
    let mut col_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); h.num_bits()];
    for i in 0..h.num_checks() {
        for (pos, &j) in h.row_support(i).iter().enumerate() {
            col_edges[j].push((i, pos));
        }
    }

    let mut messages = EdgeMessages::zeros(h);
    let mut scratch = Vec::new();
    let mut k = 0;
    while k < max_iterations {
        k += 1;
        messages.advance();
        for i in 0..h.num_checks() {
            scratch.clear();
            scratch.extend(
                h.row_support(i)
                    .iter()
                    .zip(messages.previous_row(i))
                    .map(|(&j, &eta_prev)| lambda[j] - eta_prev),
            );
            messages.set_row(i, check_node_update(&scratch)?);
        }
        for (j, edges) in col_edges.iter().enumerate() {
            lambda[j] = bit_node_update(
                r[j],
                edges.iter().map(|&(i, pos)| messages.row(i)[pos]),
            );
        }
        observer(k, &lambda);
        if k % check_every == 0 || k == max_iterations {
            hard = slice(&lambda);
            if h.is_codeword(&hard).expect("length checked above") {
                return Ok(DecodeOutcome {
                    is_codeword: true,
                    iterations: k,
                    hard,
                    soft: LlrVector::new(lambda).expect("finite inputs stay finite"),
                });
            }
        }
    }
    hard = slice(&lambda);
    Ok(DecodeOutcome {
        is_codeword: false,
        iterations: k,
        hard,
        soft: LlrVector::new(lambda).expect("finite inputs stay finite"),
    })
}
