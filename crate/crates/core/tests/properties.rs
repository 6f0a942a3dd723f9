//! Randomized invariants over the public API: structural consistency of
//! parity matrices, format round-trips, decoder agreement, and schedule
//! semantics.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mapsum::channel::LlrVector;
use mapsum::decoder::batch::decode_batch;
use mapsum::decoder::mapreduce::{decode_mr, fan_out};
use mapsum::decoder::reference::decode_ref;
use mapsum::decoder::slice_bit;
use mapsum::parity::alist::{parse_alist, serialize_alist};
use mapsum::parity::qc::QcSpec;
use mapsum::parity::ParityMatrix;

fn parity_matrix() -> impl Strategy<Value = ParityMatrix> {
    (3usize..=8, 6usize..=16).prop_flat_map(|(m, n)| {
        let columns: Vec<usize> = (0..n).collect();
        prop::collection::vec(prop::sample::subsequence(columns, 2..=4), m)
            .prop_map(move |supports| {
                ParityMatrix::from_row_supports(supports, n).expect("valid by construction")
            })
    })
}

fn matrix_and_frame() -> impl Strategy<Value = (ParityMatrix, LlrVector)> {
    parity_matrix().prop_flat_map(|h| {
        let n = h.num_bits();
        (
            Just(h),
            prop::collection::vec(-4.0f64..4.0, n)
                .prop_map(|values| LlrVector::new(values).expect("finite by construction")),
        )
    })
}

fn qc_spec() -> impl Strategy<Value = QcSpec> {
    (1usize..=3, 1usize..=4, 2usize..=7, 1usize..=2, any::<u64>()).prop_map(
        |(row_blocks, col_blocks, block_size, shifts, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            QcSpec::random(row_blocks, col_blocks, block_size, shifts, &mut rng)
                .expect("shifts <= block size")
        },
    )
}

proptest! {
    /// Row and column adjacency describe the same set of entries, and both
    /// agree with the dense grid.
    #[test]
    fn adjacency_views_agree(h in parity_matrix()) {
        let mut from_rows = Vec::new();
        for i in 0..h.num_checks() {
            prop_assert!(h.row_support(i).windows(2).all(|w| w[0] < w[1]));
            for &j in h.row_support(i) {
                prop_assert!(h.entry(i, j));
                from_rows.push((i, j));
            }
        }
        let mut from_cols = Vec::new();
        for j in 0..h.num_bits() {
            prop_assert!(h.col_support(j).windows(2).all(|w| w[0] < w[1]));
            for &i in h.col_support(j) {
                from_cols.push((i, j));
            }
        }
        from_rows.sort_unstable();
        from_cols.sort_unstable();
        prop_assert_eq!(&from_rows, &from_cols);
        prop_assert_eq!(from_rows.len(), h.ones());
    }

    /// The syndrome is linear over GF(2).
    #[test]
    fn syndrome_is_linear(h in parity_matrix(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<u8> = (0..h.num_bits()).map(|_| rng.random_range(0..2)).collect();
        let b: Vec<u8> = (0..h.num_bits()).map(|_| rng.random_range(0..2)).collect();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let sa = h.syndrome(&a).unwrap();
        let sb = h.syndrome(&b).unwrap();
        let ssum = h.syndrome(&sum).unwrap();
        let combined: Vec<u8> = sa.bits().iter().zip(sb.bits()).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(ssum.bits(), &combined[..]);
    }

    /// Serializing and reparsing reproduces the matrix, and the serialized
    /// form is a fixed point.
    #[test]
    fn alist_round_trips(h in parity_matrix()) {
        let text = serialize_alist(&h);
        let reparsed = parse_alist(&text).unwrap();
        prop_assert_eq!(&reparsed, &h);
        prop_assert_eq!(serialize_alist(&reparsed), text);
    }

    /// Expansion places exactly blockSize ones per listed shift, and the QC
    /// text form round-trips.
    #[test]
    fn qc_expansion_counts_and_round_trip(spec in qc_spec()) {
        let h = spec.expand().unwrap();
        prop_assert_eq!(h.num_checks(), spec.row_blocks() * spec.block_size());
        prop_assert_eq!(h.num_bits(), spec.col_blocks() * spec.block_size());
        prop_assert_eq!(h.ones(), spec.expanded_ones());
        prop_assert_eq!(QcSpec::parse(&spec.serialize()).unwrap(), spec);
    }

    /// Fan-out leaves zeros exactly where H has zeros.
    #[test]
    fn fan_out_respects_the_mask((h, r) in matrix_and_frame()) {
        let lambda = fan_out(r.values(), &h, None).unwrap();
        for i in 0..h.num_checks() {
            for j in 0..h.num_bits() {
                if h.entry(i, j) {
                    prop_assert_eq!(lambda.get(i, j), r.values()[j]);
                } else {
                    prop_assert_eq!(lambda.get(i, j), 0.0);
                }
            }
        }
    }

    /// The two decoders agree outcome for outcome on random codes.
    #[test]
    fn decoders_agree((h, r) in matrix_and_frame()) {
        let reference = decode_ref(&h, &r, 30, 1).unwrap();
        let mapreduce = decode_mr(&h, &r, 30, 1).unwrap();
        prop_assert_eq!(reference, mapreduce);
    }

    /// A reported success is a real codeword, the iteration count respects
    /// the cap, and with checkEvery=e termination lands on the schedule.
    #[test]
    fn outcomes_are_internally_consistent((h, r) in matrix_and_frame(), every in 1usize..=7) {
        let max_iterations = 30;
        let outcome = decode_mr(&h, &r, max_iterations, every).unwrap();
        prop_assert!(outcome.iterations <= max_iterations);
        if outcome.is_codeword {
            prop_assert!(h.is_codeword(&outcome.hard).unwrap());
        }
        if outcome.is_codeword && outcome.iterations > 0 && outcome.iterations < max_iterations {
            prop_assert_eq!(outcome.iterations % every, 0);
        }
    }

    /// Positive scaling of the received values never changes hard decisions
    /// or the termination iteration.
    #[test]
    fn hard_decisions_are_scale_invariant((h, r) in matrix_and_frame(), scale in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0])) {
        let baseline = decode_mr(&h, &r, 30, 1).unwrap();
        let scaled_input =
            LlrVector::new(r.values().iter().map(|v| v * scale).collect()).unwrap();
        let scaled = decode_mr(&h, &scaled_input, 30, 1).unwrap();
        prop_assert_eq!(&baseline.hard, &scaled.hard);
        prop_assert_eq!(baseline.iterations, scaled.iterations);
        prop_assert_eq!(baseline.is_codeword, scaled.is_codeword);
    }

    /// Batch decoding matches frame-by-frame decoding for any worker count.
    #[test]
    fn batch_matches_sequential((h, r) in matrix_and_frame(), workers in 1usize..=4) {
        let frames = vec![r.clone(), r];
        let batched = decode_batch(&h, &frames, 20, 2, workers).unwrap();
        for (frame, outcome) in frames.iter().zip(&batched) {
            let single = decode_mr(&h, frame, 20, 2).unwrap();
            prop_assert_eq!(outcome, &single);
        }
    }

    /// Slicing is the strict-positive indicator.
    #[test]
    fn slice_matches_sign(value in -10.0f64..10.0) {
        prop_assert_eq!(slice_bit(value), u8::from(value > 0.0));
    }
}
