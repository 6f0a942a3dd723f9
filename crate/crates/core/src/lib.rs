//! Min-Sum LDPC decoding recast as map-reduce passes over dense matrices,
//! with a Tanner-graph reference decoder, an AWGN channel model, and an
//! experiment harness for BER and throughput sweeps.
//!
//! The decoder pair is the point of the crate: [`decoder::reference`]
//! implements the textbook per-edge message schedule, and
//! [`decoder::mapreduce`] implements the same arithmetic as whole-matrix
//! map and reduce stages that never index by adjacency list. The two are
//! kept bit-identical, so either can check the other.
//!
//! Typical use:
//!
//! ```
//! use mapsum::channel::{add_awgn, modulate, ChannelConfig};
//! use mapsum::decoder::mapreduce::decode_mr;
//! use mapsum::parity::ParityMatrix;
//!
//! let h = ParityMatrix::from_index_sets(
//!     &[vec![1, 2, 3], vec![2, 3, 4], vec![1, 3, 4]],
//!     4,
//! )?;
//! let cfg = ChannelConfig::new(6.0, 0.25, 7)?;
//! let r = add_awgn(&modulate(&[0, 0, 0, 0]), &cfg);
//! let outcome = decode_mr(&h, &r, 50, 1)?;
//! assert!(outcome.is_codeword);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod channel;
pub mod decoder;
pub mod parity;
pub mod sweep;

pub use channel::{ChannelConfig, LlrVector};
pub use decoder::{slice, DecodeOutcome};
pub use parity::{ParityMatrix, Syndrome};
pub use sweep::{DecoderKind, SweepConfig, SweepResult};
