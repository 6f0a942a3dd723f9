//! Command line for the mapsum decoder: single-frame decoding, SNR sweeps,
//! worker-scaling studies, quasi-cyclic matrix generation, and conversion
//! to canonical alist form.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or format errors.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mapsum::channel::LlrVector;
use mapsum::decoder::mapreduce::{decode_mr, decode_mr_timed};
use mapsum::decoder::reference::decode_ref;
use mapsum::decoder::DecodeOutcome;
use mapsum::parity::alist::{parse_alist_lenient, serialize_alist};
use mapsum::parity::qc::QcSpec;
use mapsum::parity::ParityMatrix;
use mapsum::sweep::{
    emit_csv, emit_csv_verbose, run_sweep, scaling_study, DecoderKind, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "mapsum",
    version,
    about = "Min-Sum LDPC decoding as map-reduce passes over dense matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one frame of channel LLRs
    Decode(DecodeArgs),
    /// Sweep SNR points and report BER, FER, and throughput as CSV
    Sweep(SweepArgs),
    /// Replay one frame set at several worker counts and compare throughput
    Scaling(ScalingArgs),
    /// Generate a random quasi-cyclic matrix spec
    GenQc(GenQcArgs),
    /// Rewrite an alist or QC matrix file as canonical alist
    Convert(ConvertArgs),
}

/// Where the parity matrix comes from: exactly one of the two formats.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct MatrixSource {
    /// Parity matrix in alist format
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,

    /// Parity matrix as a quasi-cyclic shift table, expanded on load
    #[arg(long, value_name = "PATH")]
    qc: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Reference,
    Mapreduce,
}

impl From<DecoderArg> for DecoderKind {
    fn from(arg: DecoderArg) -> Self {
        match arg {
            DecoderArg::Reference => DecoderKind::Reference,
            DecoderArg::Mapreduce => DecoderKind::Mapreduce,
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    source: MatrixSource,

    /// Received LLR frame, one decimal real per line
    #[arg(long, value_name = "PATH")]
    llr: PathBuf,

    /// Decoder implementation
    #[arg(long, value_enum, default_value = "mapreduce")]
    decoder: DecoderArg,

    /// Iteration cap
    #[arg(long, value_name = "N", default_value_t = 50)]
    max_iters: usize,

    /// Run the codeword check every N iterations
    #[arg(long, value_name = "N", default_value_t = 1)]
    check_every: usize,

    /// Write the result here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Append the per-stage timing table (mapreduce only)
    #[arg(long)]
    timings: bool,

    /// Also print the final soft values, one per line
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: MatrixSource,

    /// SNR points in dB, comma separated
    #[arg(long, value_name = "DB[,DB...]", value_delimiter = ',', required = true)]
    snr: Vec<f64>,

    /// Frames per SNR point
    #[arg(long, value_name = "N", default_value_t = 56)]
    frames: usize,

    /// Iteration cap
    #[arg(long, value_name = "N", default_value_t = 50)]
    max_iters: usize,

    /// Run the codeword check every N iterations
    #[arg(long, value_name = "N", default_value_t = 6)]
    check_every: usize,

    /// Worker threads for batch decoding
    #[arg(long, value_name = "N", default_value_t = 1)]
    workers: usize,

    /// Channel noise seed
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Decoder implementation
    #[arg(long, value_enum, default_value = "mapreduce")]
    decoder: DecoderArg,

    /// Include channel sampling in wall time (default times decode only)
    #[arg(long)]
    end_to_end: bool,

    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Append the aggregate per-stage timing table (mapreduce only)
    #[arg(long)]
    timings: bool,

    /// Add an undetected_frames column to the CSV
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    source: MatrixSource,

    /// SNR points in dB for the replayed frame set, comma separated
    #[arg(long, value_name = "DB[,DB...]", value_delimiter = ',', required = true)]
    snr: Vec<f64>,

    /// Frames per SNR point
    #[arg(long, value_name = "N", default_value_t = 56)]
    frames: usize,

    /// Iteration cap
    #[arg(long, value_name = "N", default_value_t = 50)]
    max_iters: usize,

    /// Run the codeword check every N iterations
    #[arg(long, value_name = "N", default_value_t = 6)]
    check_every: usize,

    /// Worker counts to compare, comma separated
    #[arg(long, value_name = "N[,N...]", value_delimiter = ',', default_value = "1,2,4,8")]
    workers: Vec<usize>,

    /// Channel noise seed
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Decoder implementation
    #[arg(long, value_enum, default_value = "mapreduce")]
    decoder: DecoderArg,

    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenQcArgs {
    /// Block rows in the shift table
    #[arg(long, value_name = "N")]
    row_blocks: usize,

    /// Block columns in the shift table
    #[arg(long, value_name = "N")]
    col_blocks: usize,

    /// Circulant dimension Z
    #[arg(long, value_name = "N")]
    block_size: usize,

    /// Distinct cyclic shifts per block
    #[arg(long, value_name = "N", default_value_t = 1)]
    shifts_per_block: usize,

    /// Shift-table seed
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Write the spec here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input matrix file, alist or QC format
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,

    /// Write the alist here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(String),
}

fn data_error(err: impl Display) -> CliError {
    CliError::Data(err.to_string())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            err.print().expect("failed to write diagnostics");
            process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Decode(args) => run_decode(args),
        Command::Sweep(args) => run_sweep_command(args),
        Command::Scaling(args) => run_scaling(args),
        Command::GenQc(args) => run_gen_qc(args),
        Command::Convert(args) => run_convert(args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            process::exit(1);
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            process::exit(2);
        }
    }
}

fn require_at_least_one(value: usize, flag: &str) -> Result<(), CliError> {
    if value < 1 {
        return Err(CliError::Usage(format!("--{flag} must be at least 1")));
    }
    Ok(())
}

fn require_finite_snr(points: &[f64]) -> Result<(), CliError> {
    match points.iter().find(|p| !p.is_finite()) {
        Some(bad) => Err(CliError::Usage(format!("--snr values must be finite, got {bad}"))),
        None => Ok(()),
    }
}

fn require_mapreduce_for_timings(timings: bool, decoder: DecoderArg) -> Result<(), CliError> {
    if timings && decoder != DecoderArg::Mapreduce {
        return Err(CliError::Usage(
            "--timings requires --decoder mapreduce".to_string(),
        ));
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
}

fn load_matrix(source: &MatrixSource) -> Result<ParityMatrix, CliError> {
    if let Some(path) = &source.matrix {
        let text = read_file(path)?;
        parse_alist_lenient(&text)
            .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
    } else {
        let path = source.qc.as_ref().expect("clap enforces one matrix source");
        let text = read_file(path)?;
        QcSpec::parse(&text)
            .and_then(|spec| spec.expand())
            .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
    }
}

fn read_llr(path: &Path, expected: usize) -> Result<LlrVector, CliError> {
    let text = read_file(path)?;
    let mut values = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| {
            CliError::Data(format!(
                "{}:{}: expected one decimal real per line, found {:?}",
                path.display(),
                index + 1,
                trimmed
            ))
        })?;
        values.push(value);
    }
    if values.len() != expected {
        return Err(CliError::Data(format!(
            "{}: {} values, but the matrix has {} bit columns",
            path.display(),
            values.len(),
            expected
        )));
    }
    LlrVector::new(values).map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
}

/// Writes `body` to `--out` or standard output. The timing table, when
/// present, always goes to standard output so a written file stays clean.
fn emit(out: &Option<PathBuf>, body: &str, table: Option<String>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, body)
                .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?;
            if let Some(table) = table {
                print!("{table}");
            }
        }
        None => {
            print!("{body}");
            if let Some(table) = table {
                println!();
                print!("{table}");
            }
        }
    }
    Ok(())
}

fn render_decode(outcome: &DecodeOutcome, verbose: bool) -> String {
    let bits: String = outcome
        .hard
        .iter()
        .map(|&bit| char::from(b'0' + bit))
        .collect();
    let mut body = format!(
        "codeword {}\niterations {}\nhard {bits}\n",
        outcome.is_codeword, outcome.iterations
    );
    if verbose {
        for value in outcome.soft.values() {
            body.push_str(&format!("{value}\n"));
        }
    }
    body
}

fn run_decode(args: DecodeArgs) -> Result<(), CliError> {
    require_at_least_one(args.max_iters, "max-iters")?;
    require_at_least_one(args.check_every, "check-every")?;
    require_mapreduce_for_timings(args.timings, args.decoder)?;
    let h = load_matrix(&args.source)?;
    let r = read_llr(&args.llr, h.num_bits())?;
    let (outcome, table) = match (args.decoder, args.timings) {
        (DecoderArg::Mapreduce, true) => {
            let (outcome, timings) = decode_mr_timed(&h, &r, args.max_iters, args.check_every)
                .map_err(data_error)?;
            (outcome, Some(timings.render_table()))
        }
        (DecoderArg::Mapreduce, false) => (
            decode_mr(&h, &r, args.max_iters, args.check_every).map_err(data_error)?,
            None,
        ),
        (DecoderArg::Reference, _) => (
            decode_ref(&h, &r, args.max_iters, args.check_every).map_err(data_error)?,
            None,
        ),
    };
    emit(&args.out, &render_decode(&outcome, args.verbose), table)
}

fn run_sweep_command(args: SweepArgs) -> Result<(), CliError> {
    require_at_least_one(args.frames, "frames")?;
    require_at_least_one(args.max_iters, "max-iters")?;
    require_at_least_one(args.check_every, "check-every")?;
    require_at_least_one(args.workers, "workers")?;
    require_finite_snr(&args.snr)?;
    require_mapreduce_for_timings(args.timings, args.decoder)?;
    let h = load_matrix(&args.source)?;
    let cfg = SweepConfig {
        snr_points: args.snr,
        frames_per_point: args.frames,
        max_iterations: args.max_iters,
        check_every: args.check_every,
        workers: args.workers,
        seed: args.seed,
        decoder: args.decoder.into(),
        end_to_end: args.end_to_end,
    };
    let result = run_sweep(&h, &cfg).map_err(data_error)?;
    let mut csv = Vec::new();
    if args.verbose {
        emit_csv_verbose(&result, &mut csv)
    } else {
        emit_csv(&result, &mut csv)
    }
    .map_err(data_error)?;
    let body = String::from_utf8(csv).expect("CSV output is UTF-8");
    let table = args
        .timings
        .then(|| result.stage_timings.render_table());
    emit(&args.out, &body, table)
}

fn run_scaling(args: ScalingArgs) -> Result<(), CliError> {
    require_at_least_one(args.frames, "frames")?;
    require_at_least_one(args.max_iters, "max-iters")?;
    require_at_least_one(args.check_every, "check-every")?;
    if args.workers.is_empty() {
        return Err(CliError::Usage("--workers needs at least one count".to_string()));
    }
    for &workers in &args.workers {
        require_at_least_one(workers, "workers")?;
    }
    require_finite_snr(&args.snr)?;
    let h = load_matrix(&args.source)?;
    let cfg = SweepConfig {
        snr_points: args.snr,
        frames_per_point: args.frames,
        max_iterations: args.max_iters,
        check_every: args.check_every,
        workers: 1,
        seed: args.seed,
        decoder: args.decoder.into(),
        end_to_end: false,
    };
    let rows = scaling_study(&h, &cfg, &args.workers).map_err(data_error)?;
    let mut body = String::from("workers,wall_seconds,throughput_bps\n");
    for row in &rows {
        body.push_str(&format!(
            "{},{:.6e},{:.6e}\n",
            row.workers, row.wall_seconds, row.throughput_bps
        ));
    }
    emit(&args.out, &body, None)
}

fn run_gen_qc(args: GenQcArgs) -> Result<(), CliError> {
    require_at_least_one(args.row_blocks, "row-blocks")?;
    require_at_least_one(args.col_blocks, "col-blocks")?;
    require_at_least_one(args.block_size, "block-size")?;
    require_at_least_one(args.shifts_per_block, "shifts-per-block")?;
    if args.shifts_per_block > args.block_size {
        return Err(CliError::Usage(
            "--shifts-per-block cannot exceed --block-size".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let spec = QcSpec::random(
        args.row_blocks,
        args.col_blocks,
        args.block_size,
        args.shifts_per_block,
        &mut rng,
    )
    .map_err(data_error)?;
    emit(&args.out, &spec.serialize(), None)
}

fn run_convert(args: ConvertArgs) -> Result<(), CliError> {
    let text = read_file(&args.input)?;
    let header_fields = text
        .lines()
        .find(|line| !line.trim().is_empty())
        .map(|line| line.split_whitespace().count())
        .unwrap_or(0);
    let h = match header_fields {
        2 => parse_alist_lenient(&text)
            .map_err(|err| CliError::Data(format!("{}: {err}", args.input.display())))?,
        3 => QcSpec::parse(&text)
            .and_then(|spec| spec.expand())
            .map_err(|err| CliError::Data(format!("{}: {err}", args.input.display())))?,
        _ => {
            return Err(CliError::Data(format!(
                "{}: unrecognized matrix format; expected an alist header (2 fields) or a QC header (3 fields)",
                args.input.display()
            )))
        }
    };
    emit(&args.out, &serialize_alist(&h), None)
}
