//! Experiment harness: SNR sweeps over the AWGN channel, bit and frame
//! error accounting, throughput measurement, worker-scaling studies, and
//! CSV emission.
//!
//! Sweeps transmit the all-zero codeword. That loses no generality: the
//! code is linear, the channel is symmetric, and Min-Sum is sign-symmetric,
//! so error statistics are codeword-independent, and no encoder is needed.

use std::io::{self, Write};
use std::time::Instant;

use thiserror::Error;

use crate::channel::{add_awgn, modulate, ChannelConfig, ChannelError, LlrVector};
use crate::decoder::batch::decode_batch_timed;
use crate::decoder::mapreduce::StageTimings;
use crate::decoder::reference::decode_ref;
use crate::decoder::{slice_bit, DecodeError, DecodeOutcome};
use crate::parity::ParityMatrix;

use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

/// Errors from sweep configuration and execution.
#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("{field} must be at least 1")]
    InvalidCount { field: &'static str },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("outcomes differ between worker counts {a} and {b}")]
    NondeterministicScaling { a: usize, b: usize },
}

/// Which decoder implementation a sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Reference,
    Mapreduce,
}

/// Parameters of an SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub snr_points: Vec<f64>,
    pub frames_per_point: usize,
    pub max_iterations: usize,
    pub check_every: usize,
    pub workers: usize,
    pub seed: u64,
    pub decoder: DecoderKind,
    /// When set, per-point wall time includes channel sampling; the
    /// default times decoding only.
    pub end_to_end: bool,
}

impl SweepConfig {
    fn validate(&self) -> Result<(), SweepError> {
        for (value, field) in [
            (self.frames_per_point, "framesPerPoint"),
            (self.max_iterations, "maxIterations"),
            (self.check_every, "checkEvery"),
            (self.workers, "workers"),
        ] {
            if value < 1 {
                return Err(SweepError::InvalidCount { field });
            }
        }
        Ok(())
    }
}

/// Accumulated statistics for one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrPointResult {
    pub snr_db: f64,
    pub frames: usize,
    pub raw_bit_errors: usize,
    pub decoded_bit_errors: usize,
    /// Frames that failed: no codeword found, or a codeword other than the
    /// transmitted one.
    pub frame_errors: usize,
    /// Frames where the decoder claimed a codeword that was not the
    /// transmitted one: errors the syndrome cannot see.
    pub undetected_frames: usize,
    pub avg_iterations: f64,
    pub wall_seconds: f64,
    pub throughput_bps: f64,
}

impl SnrPointResult {
    pub fn raw_ber(&self, num_bits: usize) -> f64 {
        self.raw_bit_errors as f64 / (self.frames * num_bits) as f64
    }

    pub fn decoded_ber(&self, num_bits: usize) -> f64 {
        self.decoded_bit_errors as f64 / (self.frames * num_bits) as f64
    }

    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.frames as f64
    }
}

/// Results of a whole sweep: one entry per SNR point plus stage timings
/// aggregated over every decoded frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub num_bits: usize,
    pub points: Vec<SnrPointResult>,
    pub stage_timings: StageTimings,
}

/// One row of a worker-scaling study.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub workers: usize,
    pub wall_seconds: f64,
    pub throughput_bps: f64,
}

/// Throughput in decoded bits per second.
pub fn throughput_bps(frames: usize, num_bits: usize, wall_seconds: f64) -> f64 {
    (frames * num_bits) as f64 / wall_seconds
}

/// The noise frames for one SNR point, derived deterministically from
/// (seed, point index, frame index).
fn sample_frames(
    h: &ParityMatrix,
    cfg: &SweepConfig,
    point_index: usize,
    snr_db: f64,
) -> Result<Vec<LlrVector>, SweepError> {
    let zero = modulate(&vec![0u8; h.num_bits()]);
    let point_seed = cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(point_index as u64));
    let channel = ChannelConfig::new(snr_db, h.design_rate(), point_seed)?;
    Ok((0..cfg.frames_per_point)
        .map(|f| add_awgn(&zero, &channel.for_frame(f as u64)))
        .collect())
}

fn decode_frames(
    h: &ParityMatrix,
    cfg: &SweepConfig,
    frames: &[LlrVector],
) -> Result<(Vec<DecodeOutcome>, StageTimings), SweepError> {
    match cfg.decoder {
        DecoderKind::Mapreduce => Ok(decode_batch_timed(
            h,
            frames,
            cfg.max_iterations,
            cfg.check_every,
            cfg.workers,
        )?),
        DecoderKind::Reference => {
            let outcomes: Result<Vec<DecodeOutcome>, DecodeError> = if cfg.workers == 1 {
                frames
                    .iter()
                    .map(|r| decode_ref(h, r, cfg.max_iterations, cfg.check_every))
                    .collect()
            } else {
                let pool = ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build()
                    .expect("failed to build decode thread pool");
                pool.install(|| {
                    frames
                        .par_iter()
                        .map(|r| decode_ref(h, r, cfg.max_iterations, cfg.check_every))
                        .collect()
                })
            };
            Ok((outcomes?, StageTimings::new()))
        }
    }
}

/// Runs the sweep: for each SNR point, samples `framesPerPoint` noisy
/// all-zero frames, decodes them, and accumulates error, iteration, and
/// timing statistics. Every non-timing field is determined by
/// (h, config, seed).
pub fn run_sweep(h: &ParityMatrix, cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.snr_points.len());
    let mut stage_timings = StageTimings::new();
    for (point_index, &snr_db) in cfg.snr_points.iter().enumerate() {
        let sampling_start = Instant::now();
        let frames = sample_frames(h, cfg, point_index, snr_db)?;
        let sampling_seconds = sampling_start.elapsed().as_secs_f64();

        let decode_start = Instant::now();
        let (outcomes, timings) = decode_frames(h, cfg, &frames)?;
        let mut wall_seconds = decode_start.elapsed().as_secs_f64();
        if cfg.end_to_end {
            wall_seconds += sampling_seconds;
        }
        stage_timings.merge(&timings);

        let mut raw_bit_errors = 0;
        let mut decoded_bit_errors = 0;
        let mut frame_errors = 0;
        let mut undetected_frames = 0;
        let mut iterations = 0usize;
        for (r, outcome) in frames.iter().zip(outcomes.iter()) {
            raw_bit_errors += r.values().iter().filter(|&&v| slice_bit(v) != 0).count();
            let wrong_bits = outcome.hard.iter().filter(|&&b| b != 0).count();
            decoded_bit_errors += wrong_bits;
            let failed = !outcome.is_codeword || wrong_bits > 0;
            frame_errors += failed as usize;
            undetected_frames += (outcome.is_codeword && wrong_bits > 0) as usize;
            iterations += outcome.iterations;
        }
        points.push(SnrPointResult {
            snr_db,
            frames: frames.len(),
            raw_bit_errors,
            decoded_bit_errors,
            frame_errors,
            undetected_frames,
            avg_iterations: iterations as f64 / frames.len() as f64,
            wall_seconds,
            throughput_bps: throughput_bps(frames.len(), h.num_bits(), wall_seconds),
        });
    }
    Ok(SweepResult {
        num_bits: h.num_bits(),
        points,
        stage_timings,
    })
}

/// Replays one frame set at each requested worker count and reports how
/// wall time and throughput change. Outcomes must not change; a mismatch
/// is reported as an error rather than silently ignored.
pub fn scaling_study(
    h: &ParityMatrix,
    cfg: &SweepConfig,
    worker_counts: &[usize],
) -> Result<Vec<ScalingRow>, SweepError> {
    cfg.validate()?;
    let mut frames = Vec::new();
    for (point_index, &snr_db) in cfg.snr_points.iter().enumerate() {
        frames.extend(sample_frames(h, cfg, point_index, snr_db)?);
    }
    let mut rows = Vec::with_capacity(worker_counts.len());
    let mut baseline: Option<(usize, Vec<DecodeOutcome>)> = None;
    for &workers in worker_counts {
        if workers < 1 {
            return Err(SweepError::InvalidCount { field: "workers" });
        }
        let run_cfg = SweepConfig {
            workers,
            ..cfg.clone()
        };
        let start = Instant::now();
        let (outcomes, _) = decode_frames(h, &run_cfg, &frames)?;
        let wall_seconds = start.elapsed().as_secs_f64();
        match &baseline {
            None => baseline = Some((workers, outcomes)),
            Some((base_workers, base)) => {
                if base != &outcomes {
                    return Err(SweepError::NondeterministicScaling {
                        a: *base_workers,
                        b: workers,
                    });
                }
            }
        }
        rows.push(ScalingRow {
            workers,
            wall_seconds,
            throughput_bps: throughput_bps(frames.len(), h.num_bits(), wall_seconds),
        });
    }
    Ok(rows)
}

/// CSV header written by [`emit_csv`].
pub const CSV_HEADER: &str =
    "snr_db,frames,raw_ber,decoded_ber,fer,avg_iterations,wall_seconds,throughput_bps";

/// Writes one CSV row per SNR point with LF line endings. Rates and
/// timings use scientific notation with seven significant digits.
pub fn emit_csv(result: &SweepResult, sink: &mut dyn Write) -> io::Result<()> {
    emit(result, sink, false)
}

/// As [`emit_csv`] with a trailing diagnostic column counting frames whose
/// errors the syndrome check could not detect.
pub fn emit_csv_verbose(result: &SweepResult, sink: &mut dyn Write) -> io::Result<()> {
    emit(result, sink, true)
}

fn emit(result: &SweepResult, sink: &mut dyn Write, verbose: bool) -> io::Result<()> {
    if verbose {
        writeln!(sink, "{CSV_HEADER},undetected_frames")?;
    } else {
        writeln!(sink, "{CSV_HEADER}")?;
    }
    for point in &result.points {
        let base = format!(
            "{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            point.snr_db,
            point.frames,
            point.raw_ber(result.num_bits),
            point.decoded_ber(result.num_bits),
            point.fer(),
            point.avg_iterations,
            point.wall_seconds,
            point.throughput_bps,
        );
        if verbose {
            writeln!(sink, "{base},{}", point.undetected_frames)?;
        } else {
            writeln!(sink, "{base}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::qc::QcSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn test_code() -> ParityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        QcSpec::random(2, 8, 24, 1, &mut rng).unwrap().expand().unwrap()
    }

    fn base_config() -> SweepConfig {
        SweepConfig {
            snr_points: vec![4.0],
            frames_per_point: 20,
            max_iterations: 30,
            check_every: 1,
            workers: 1,
            seed: 11,
            decoder: DecoderKind::Mapreduce,
            end_to_end: false,
        }
    }

    #[test]
    fn noiseless_sweep_has_no_errors_and_no_iterations() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![60.0],
            frames_per_point: 10,
            ..base_config()
        };
        let result = run_sweep(&h, &cfg).unwrap();
        let point = &result.points[0];
        assert_eq!(point.decoded_bit_errors, 0);
        assert_eq!(point.frame_errors, 0);
        assert_eq!(point.avg_iterations, 0.0);
        assert_eq!(point.raw_bit_errors, 0);
    }

    #[test]
    fn throughput_formula() {
        assert_eq!(throughput_bps(50, 8176, 10.0), 40_880.0);
        let h = test_code();
        let result = run_sweep(&h, &base_config()).unwrap();
        let point = &result.points[0];
        let recomputed = (point.frames * result.num_bits) as f64 / point.wall_seconds;
        assert!((point.throughput_bps - recomputed).abs() <= 1e-9 * recomputed);
    }

    #[test]
    fn statistics_are_seed_deterministic() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![2.0, 4.0],
            ..base_config()
        };
        let a = run_sweep(&h, &cfg).unwrap();
        let b = run_sweep(&h, &cfg).unwrap();
        for (x, y) in a.points.iter().zip(b.points.iter()) {
            assert_eq!(x.raw_bit_errors, y.raw_bit_errors);
            assert_eq!(x.decoded_bit_errors, y.decoded_bit_errors);
            assert_eq!(x.frame_errors, y.frame_errors);
            assert_eq!(x.undetected_frames, y.undetected_frames);
            assert_eq!(x.avg_iterations, y.avg_iterations);
        }
        let c = run_sweep(
            &h,
            &SweepConfig {
                seed: 12,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_ne!(
            a.points[0].raw_bit_errors,
            c.points[0].raw_bit_errors,
            "different seeds should draw different noise"
        );
    }

    #[test]
    fn decoder_choice_does_not_change_statistics() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![3.0],
            frames_per_point: 15,
            ..base_config()
        };
        let mapreduce = run_sweep(&h, &cfg).unwrap();
        let reference = run_sweep(
            &h,
            &SweepConfig {
                decoder: DecoderKind::Reference,
                ..cfg
            },
        )
        .unwrap();
        let (a, b) = (&mapreduce.points[0], &reference.points[0]);
        assert_eq!(a.raw_bit_errors, b.raw_bit_errors);
        assert_eq!(a.decoded_bit_errors, b.decoded_bit_errors);
        assert_eq!(a.frame_errors, b.frame_errors);
        assert_eq!(a.avg_iterations, b.avg_iterations);
    }

    #[test]
    fn coding_gain_appears_above_the_waterfall() {
        // Rate-3/4 code decoded well above its threshold: the decoder must
        // beat the raw channel by a wide margin.
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![5.0],
            frames_per_point: 60,
            max_iterations: 50,
            ..base_config()
        };
        let result = run_sweep(&h, &cfg).unwrap();
        let point = &result.points[0];
        assert!(point.raw_bit_errors > 0, "channel should flip some bits");
        assert!(
            point.decoded_bit_errors * 4 < point.raw_bit_errors,
            "decoded {} vs raw {}",
            point.decoded_bit_errors,
            point.raw_bit_errors
        );
        assert!(point.fer() < 1.0);
    }

    #[test]
    fn ber_trends_down_with_snr() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![3.0, 6.0],
            frames_per_point: 40,
            ..base_config()
        };
        let result = run_sweep(&h, &cfg).unwrap();
        assert!(
            result.points[1].decoded_bit_errors <= result.points[0].decoded_bit_errors,
            "decoded errors rose with SNR"
        );
    }

    #[test]
    fn undetected_frames_require_wrong_codeword() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![1.0, 4.0],
            frames_per_point: 30,
            ..base_config()
        };
        let result = run_sweep(&h, &cfg).unwrap();
        for point in &result.points {
            assert!(point.undetected_frames <= point.frame_errors);
        }
    }

    #[test]
    fn mapreduce_sweep_collects_stage_timings() {
        let h = test_code();
        let result = run_sweep(&h, &base_config()).unwrap();
        assert!(result.stage_timings.total() > std::time::Duration::ZERO);
        let reference = run_sweep(
            &h,
            &SweepConfig {
                decoder: DecoderKind::Reference,
                ..base_config()
            },
        )
        .unwrap();
        assert_eq!(reference.stage_timings.total(), std::time::Duration::ZERO);
    }

    #[test]
    fn scaling_rows_mirror_requested_counts() {
        let h = test_code();
        let cfg = SweepConfig {
            frames_per_point: 32,
            ..base_config()
        };
        let rows = scaling_study(&h, &cfg, &[1, 2, 4]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(
            rows.iter().map(|r| r.workers).collect::<Vec<_>>(),
            vec![1, 2, 4]
        );
        for row in &rows {
            assert!(row.wall_seconds > 0.0);
            assert!(row.throughput_bps > 0.0);
        }
    }

    #[test]
    fn invalid_counts_are_rejected() {
        let h = test_code();
        let cfg = SweepConfig {
            frames_per_point: 0,
            ..base_config()
        };
        assert!(matches!(
            run_sweep(&h, &cfg),
            Err(SweepError::InvalidCount {
                field: "framesPerPoint"
            })
        ));
        assert!(matches!(
            scaling_study(&h, &base_config(), &[1, 0]),
            Err(SweepError::InvalidCount { field: "workers" })
        ));
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let h = test_code();
        let cfg = SweepConfig {
            snr_points: vec![2.0, 4.0],
            frames_per_point: 10,
            ..base_config()
        };
        let result = run_sweep(&h, &cfg).unwrap();
        let mut buffer = Vec::new();
        emit_csv(&result, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        for (line, point) in lines[1..].iter().zip(result.points.iter()) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            assert_eq!(fields[0].parse::<f64>().unwrap(), point.snr_db);
            assert_eq!(fields[1].parse::<usize>().unwrap(), point.frames);
            let parsed_raw: f64 = fields[2].parse().unwrap();
            let expected_raw = point.raw_ber(result.num_bits);
            assert!((parsed_raw - expected_raw).abs() <= 1e-6 * expected_raw.max(1e-12));
            let parsed_throughput: f64 = fields[7].parse().unwrap();
            assert!(
                (parsed_throughput - point.throughput_bps).abs()
                    <= 1e-6 * point.throughput_bps
            );
        }
    }

    #[test]
    fn csv_with_no_points_is_header_only() {
        let result = SweepResult {
            num_bits: 10,
            points: Vec::new(),
            stage_timings: StageTimings::new(),
        };
        let mut buffer = Vec::new();
        emit_csv(&result, &mut buffer).unwrap();
        assert_eq!(String::from_utf8(buffer).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn verbose_csv_adds_undetected_column() {
        let h = test_code();
        let result = run_sweep(&h, &base_config()).unwrap();
        let mut buffer = Vec::new();
        emit_csv_verbose(&result, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("{CSV_HEADER},undetected_frames"));
        assert_eq!(lines[1].split(',').count(), 9);
    }

    #[test]
    fn end_to_end_flag_extends_wall_time() {
        // With sampling included the wall can only grow; both runs decode
        // identical frames, so the statistics stay equal.
        let h = test_code();
        let decode_only = run_sweep(&h, &base_config()).unwrap();
        let end_to_end = run_sweep(
            &h,
            &SweepConfig {
                end_to_end: true,
                ..base_config()
            },
        )
        .unwrap();
        assert_eq!(
            decode_only.points[0].decoded_bit_errors,
            end_to_end.points[0].decoded_bit_errors
        );
    }
}
