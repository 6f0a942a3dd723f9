//! BPSK modulation and AWGN sampling: produces the received vector `r`
//! that initializes both decoders.
//!
//! Bit 1 maps to +1.0 and bit 0 to -1.0, matching the slicing convention
//! (strictly positive means logical 1). The received values are the raw
//! channel output, not scaled log-likelihood ratios: every Min-Sum
//! operation is positively homogeneous, so decoder decisions are invariant
//! to positive scaling and the channel can skip the `2y/sigma^2` step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::decoder::slice_bit;

/// Errors from channel configuration and measurement.
#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("snrDb must be finite, got {0}")]
    InvalidSnr(f64),
    #[error("rate must lie in (0, 1), got {0}")]
    InvalidRate(f64),
    #[error("value at index {index} is not finite: {value}")]
    NonFinite { index: usize, value: f64 },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// AWGN channel parameters: SNR in dB (Eb/N0 convention, adjusted by the
/// code rate), the code rate itself, and the RNG seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    snr_db: f64,
    rate: f64,
    seed: u64,
}

impl ChannelConfig {
    pub fn new(snr_db: f64, rate: f64, seed: u64) -> Result<Self, ChannelError> {
        if !snr_db.is_finite() {
            return Err(ChannelError::InvalidSnr(snr_db));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(ChannelError::InvalidRate(rate));
        }
        Ok(Self { snr_db, rate, seed })
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Noise standard deviation: `sigma^2 = 1 / (2 * rate * 10^(snrDb/10))`.
    pub fn noise_sigma(&self) -> f64 {
        (1.0 / (2.0 * self.rate * 10f64.powf(self.snr_db / 10.0))).sqrt()
    }

    /// Same channel with an independent RNG stream for one frame, so
    /// concurrent workers can draw noise without sharing state. The
    /// derivation mixes (seed, frame) through a SplitMix64 finalizer.
    pub fn for_frame(&self, frame: u64) -> Self {
        Self {
            seed: mix_seed(self.seed, frame),
            ..*self
        }
    }
}

fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Received soft values, finite by construction. Strictly positive entries
/// slice to logical 1, everything else to logical 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
}

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ChannelError> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(ChannelError::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// BPSK maps bit 1 to +1.0 and bit 0 to -1.0.
pub fn modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Adds seed-deterministic Gaussian noise with the variance implied by the
/// config to every entry of `x`.
pub fn add_awgn(x: &[f64], cfg: &ChannelConfig) -> LlrVector {
    let sigma = cfg.noise_sigma();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let values = x
        .iter()
        .map(|&v| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            v + sigma * noise
        })
        .collect();
    LlrVector { values }
}

/// Fraction of positions where slicing `r` disagrees with `b`: the channel
/// bit error rate before any decoding.
pub fn raw_ber(r: &LlrVector, b: &[u8]) -> Result<f64, ChannelError> {
    if r.len() != b.len() {
        return Err(ChannelError::LengthMismatch {
            expected: b.len(),
            got: r.len(),
        });
    }
    if b.is_empty() {
        return Ok(0.0);
    }
    let errors = r
        .values()
        .iter()
        .zip(b.iter())
        .filter(|(&v, &bit)| slice_bit(v) != (bit & 1))
        .count();
    Ok(errors as f64 / b.len() as f64)
}
