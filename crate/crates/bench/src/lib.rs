//! Shared fixtures for the decoder benchmarks: a mid-sized quasi-cyclic
//! code with the same block structure as the large benchmark code (2x16
//! blocks, two shifts per block, so row degree 32 and column degree 4) and
//! deterministic noisy frames to decode.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mapsum::channel::{add_awgn, modulate, ChannelConfig, LlrVector};
use mapsum::parity::qc::QcSpec;
use mapsum::parity::ParityMatrix;

/// 254 checks over 2032 bits: the large code's structure at Z=127.
pub fn benchmark_code() -> ParityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    QcSpec::random(2, 16, 127, 2, &mut rng)
        .expect("fixture spec is valid")
        .expand()
        .expect("fixture expansion succeeds")
}

/// All-zero codeword frames through the AWGN channel at `snr_db`.
pub fn noisy_frames(h: &ParityMatrix, count: usize, snr_db: f64, seed: u64) -> Vec<LlrVector> {
    let channel = ChannelConfig::new(snr_db, h.design_rate(), seed).expect("valid channel");
    let x = modulate(&vec![0u8; h.num_bits()]);
    (0..count)
        .map(|frame| add_awgn(&x, &channel.for_frame(frame as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_has_the_expected_shape() {
        let h = benchmark_code();
        assert_eq!(h.num_checks(), 254);
        assert_eq!(h.num_bits(), 2032);
        assert_eq!(h.max_row_degree(), 32);
        assert_eq!(h.max_col_degree(), 4);
    }

    #[test]
    fn frames_are_deterministic() {
        let h = benchmark_code();
        let a = noisy_frames(&h, 3, 4.0, 9);
        let b = noisy_frames(&h, 3, 4.0, 9);
        assert_eq!(a, b);
    }
}
