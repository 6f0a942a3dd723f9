//! Min-Sum LDPC decoding.
//!
//! Two interchangeable implementations share this module's types:
//! [`reference`] walks the Tanner graph edge by edge and serves as the
//! correctness oracle, while [`mapreduce`] runs the same arithmetic as
//! dense matrix passes with per-row reduction summaries. Both produce
//! bit-identical outcomes; [`batch`] decodes many frames concurrently.

use thiserror::Error;

use crate::channel::LlrVector;

pub mod batch;
pub mod mapreduce;
pub mod reference;

/// Errors from decoder entry points.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("received vector length {got} does not match bit count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("checkEvery must be at least 1")]
    InvalidCheckEvery,
    #[error("row {row} has degree {degree}; Min-Sum needs at least 2")]
    RowDegreeTooSmall { row: usize, degree: usize },
}

/// What a decode run produced: whether the hard decisions form a codeword,
/// the iteration the decoder stopped at, and the final hard and soft values.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub is_codeword: bool,
    pub iterations: usize,
    pub hard: Vec<u8>,
    pub soft: LlrVector,
}

/// Hard decision for one soft value: strictly positive means logical 1.
#[inline]
pub fn slice_bit(value: f64) -> u8 {
    (value > 0.0) as u8
}

/// Hard decisions for a soft vector.
pub fn slice(soft: &[f64]) -> Vec<u8> {
    soft.iter().map(|&v| slice_bit(v)).collect()
}

/// Leave-one-out sign with the convention sign(0) = +1.
#[inline]
pub(crate) fn sign(value: f64) -> f64 {
    if value < 0.0 {
        -1.0
    } else {
        1.0
    }
}
