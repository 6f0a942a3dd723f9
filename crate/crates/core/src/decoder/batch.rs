//! Concurrent decoding of many frames against one parity-check matrix.
//!
//! Frames are independent, so the batch facility is plain data
//! parallelism: each worker owns a reusable [`MapReduceDecoder`] and the
//! matrix is shared read-only. Outcomes are returned in input order and
//! are bit-identical for every worker count, including 1, which runs
//! without a thread pool at all.

use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use super::mapreduce::{MapReduceDecoder, StageTimings};
use super::{DecodeError, DecodeOutcome};
use crate::channel::LlrVector;
use crate::parity::ParityMatrix;

/// Decodes every frame with the map-reduce decoder, using `workers`
/// threads. Results match sequential [`decode_mr`](super::mapreduce::decode_mr)
/// frame for frame.
pub fn decode_batch(
    h: &ParityMatrix,
    frames: &[LlrVector],
    max_iterations: usize,
    check_every: usize,
    workers: usize,
) -> Result<Vec<DecodeOutcome>, DecodeError> {
    decode_batch_timed(h, frames, max_iterations, check_every, workers)
        .map(|(outcomes, _)| outcomes)
}

/// As [`decode_batch`], also aggregating every frame's stage timings.
pub fn decode_batch_timed(
    h: &ParityMatrix,
    frames: &[LlrVector],
    max_iterations: usize,
    check_every: usize,
    workers: usize,
) -> Result<(Vec<DecodeOutcome>, StageTimings), DecodeError> {
    assert!(workers >= 1, "worker count must be at least 1");
    let decoded: Result<Vec<(DecodeOutcome, StageTimings)>, DecodeError> = if workers == 1 {
        let mut decoder = MapReduceDecoder::for_matrix(h);
        frames
            .iter()
            .map(|r| decoder.decode_instrumented(h, r, max_iterations, check_every, |_, _| {}))
            .collect()
    } else {
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build decode thread pool");
        pool.install(|| {
            frames
                .par_iter()
                .map_init(
                    || MapReduceDecoder::for_matrix(h),
                    |decoder, r| {
                        decoder.decode_instrumented(h, r, max_iterations, check_every, |_, _| {})
                    },
                )
                .collect()
        })
    };
    let mut timings = StageTimings::new();
    let outcomes = decoded?
        .into_iter()
        .map(|(outcome, frame_timings)| {
            timings.merge(&frame_timings);
            outcome
        })
        .collect();
    Ok((outcomes, timings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_awgn, modulate, ChannelConfig};
    use crate::decoder::mapreduce::decode_mr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn test_code() -> ParityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        crate::parity::qc::QcSpec::random(2, 4, 12, 1, &mut rng)
            .unwrap()
            .expand()
            .unwrap()
    }

    fn noisy_frames(h: &ParityMatrix, count: usize) -> Vec<LlrVector> {
        let zero = modulate(&vec![0u8; h.num_bits()]);
        let cfg = ChannelConfig::new(2.0, h.design_rate(), 5).unwrap();
        (0..count)
            .map(|f| add_awgn(&zero, &cfg.for_frame(f as u64)))
            .collect()
    }

    #[test]
    fn empty_batch_gives_empty_output() {
        let h = test_code();
        let outcomes = decode_batch(&h, &[], 10, 1, 4).unwrap();
        assert!(outcomes.is_empty());
    }

    #[test]
    fn outcomes_match_sequential_decoding_in_order() {
        let h = test_code();
        let frames = noisy_frames(&h, 40);
        let batched = decode_batch(&h, &frames, 30, 2, 3).unwrap();
        assert_eq!(batched.len(), frames.len());
        for (r, outcome) in frames.iter().zip(batched.iter()) {
            let sequential = decode_mr(&h, r, 30, 2).unwrap();
            assert_eq!(&sequential, outcome);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let h = test_code();
        let frames = noisy_frames(&h, 64);
        let base = decode_batch(&h, &frames, 25, 1, 1).unwrap();
        for workers in [2, 4, 8] {
            let other = decode_batch(&h, &frames, 25, 1, workers).unwrap();
            assert_eq!(base.len(), other.len());
            for (a, b) in base.iter().zip(other.iter()) {
                assert_eq!(a.is_codeword, b.is_codeword);
                assert_eq!(a.iterations, b.iterations);
                assert_eq!(a.hard, b.hard);
                let bits_a: Vec<u64> =
                    a.soft.values().iter().map(|v| v.to_bits()).collect();
                let bits_b: Vec<u64> =
                    b.soft.values().iter().map(|v| v.to_bits()).collect();
                assert_eq!(bits_a, bits_b);
            }
        }
    }

    #[test]
    fn timings_accumulate_across_frames() {
        let h = test_code();
        let frames = noisy_frames(&h, 8);
        let (_, timings) = decode_batch_timed(&h, &frames, 20, 1, 2).unwrap();
        assert!(timings.total() > std::time::Duration::ZERO);
    }

    #[test]
    fn decode_errors_propagate() {
        let h = test_code();
        let bad = vec![LlrVector::new(vec![0.5; h.num_bits() + 1]).unwrap()];
        assert!(matches!(
            decode_batch(&h, &bad, 10, 1, 2),
            Err(DecodeError::LengthMismatch { .. })
        ));
    }
}
