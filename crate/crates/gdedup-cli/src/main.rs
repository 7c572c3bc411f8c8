//! Command-line frontend: encode/decode files, evaluate bounds tables, run
//! simulations and chunk-length sweeps, render charts.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or decode error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use gdedup::analysis::ThetaAccumulator;
use gdedup::bitstream::{BitReader, BitWriter};
use gdedup::codec::{decode, encode, EncodedStream};
use gdedup::harness::{
    emit_plot, export_csv, parse_csv, run_experiment, sweep_chunk_length, ExperimentConfig,
};
use gdedup::source::build_source;
use gdedup::{Chunk, CodeSpec, KMode, Mode};

#[derive(Parser)]
#[command(
    name = "gdedup",
    version,
    about = "Generalized deduplication: codec, bounds, and Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a raw file into a .gddp container
    Encode(EncodeArgs),
    /// Decode a .gddp container back to raw bytes
    Decode(DecodeArgs),
    /// Write the analytical bound table as CSV
    Bounds(BoundsArgs),
    /// Run a Monte Carlo experiment and write its CSV table
    Simulate(SimulateArgs),
    /// Rerun the experiment across chunk lengths and report peak ratios
    Sweep(SweepArgs),
    /// Render SVG charts from a simulation CSV
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classic,
    Generalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum KModeArg {
    Full,
    Compact,
}

impl From<KModeArg> for KMode {
    fn from(arg: KModeArg) -> Self {
        match arg {
            KModeArg::Full => KMode::Full,
            KModeArg::Compact => KMode::Compact,
        }
    }
}

#[derive(Args)]
struct EncodeArgs {
    /// Coding mode
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Hamming parity bits (generalized mode; chunk length is 2^m - 1)
    #[arg(long)]
    m: Option<u32>,
    /// Chunk length in bits (classic mode)
    #[arg(long)]
    n: Option<usize>,
    /// Base representation (generalized mode)
    #[arg(long, value_enum, default_value = "full")]
    k_mode: KModeArg,
    /// Exact input length in bits; defaults to the whole file. Must be a
    /// multiple of the chunk length and fill the file's final byte.
    #[arg(long)]
    bits: Option<u64>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Print the decoded bit count on stdout
    #[arg(long)]
    bits_out: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Hamming parity bits
    #[arg(long)]
    m: u32,
    /// Active base count |X|
    #[arg(long)]
    active: u64,
    #[arg(long, value_enum, default_value = "full")]
    k_mode: KModeArg,
    /// Largest chunk count C; one row per C
    #[arg(long, default_value_t = 1024)]
    c_max: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Hamming parity bits
    #[arg(long)]
    m: u32,
    /// Active base count |X|
    #[arg(long)]
    active: u64,
    /// Chunks per trial
    #[arg(long)]
    chunks: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "full")]
    k_mode: KModeArg,
    /// Also record the DEFLATE-compressed length of the raw prefix
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Hamming parity bit counts, e.g. --m 4,5,6
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u32>,
    #[arg(long)]
    active: u64,
    #[arg(long)]
    chunks: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "full")]
    k_mode: KModeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV written by `simulate`
    #[arg(long)]
    input: PathBuf,
    /// Output path prefix; writes <prefix>_{length,delta,ratio}.svg
    #[arg(long)]
    out_prefix: PathBuf,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<gdedup::Error> for CliError {
    fn from(err: gdedup::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_encode(args: EncodeArgs) -> Result<(), CliError> {
    let (spec, mode) = match args.mode {
        ModeArg::Classic => {
            if args.m.is_some() {
                return Err(CliError::Usage("--m applies only to generalized mode".into()));
            }
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("classic mode requires --n".into()))?;
            (CodeSpec::trivial(n)?, Mode::Classic)
        }
        ModeArg::Generalized => {
            if args.n.is_some() {
                return Err(CliError::Usage("--n applies only to classic mode".into()));
            }
            let m = args
                .m
                .ok_or_else(|| CliError::Usage("generalized mode requires --m".into()))?;
            (CodeSpec::hamming(m, args.k_mode.into())?, Mode::Generalized)
        }
    };

    let bytes = read_file(&args.input)?;
    let total_bits = bytes.len() as u64 * 8;
    let bits = args.bits.unwrap_or(total_bits);
    if bits.div_ceil(8) != bytes.len() as u64 {
        return Err(CliError::Data(format!(
            "--bits {bits} does not fill the {} byte input exactly",
            bytes.len()
        )));
    }
    let n = spec.n() as u64;
    if !bits.is_multiple_of(n) {
        return Err(CliError::Data(
            gdedup::Error::UnalignedInput { bits, n: spec.n() }.to_string(),
        ));
    }

    let mut reader = BitReader::new(&bytes);
    let mut chunks = Vec::with_capacity((bits / n) as usize);
    for _ in 0..bits / n {
        chunks.push(Chunk::read_from(&mut reader, spec.n())?);
    }
    let stream = encode(&chunks, spec, mode)?;
    write_file(&args.output, &stream.to_container())?;
    eprintln!(
        "encoded {} chunks ({bits} bits) into {} payload bits",
        stream.chunk_count,
        stream.payload.len_bits()
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let bytes = read_file(&args.input)?;
    let stream = EncodedStream::from_container(&bytes)?;
    let chunks = decode(&stream)?;
    let mut writer = BitWriter::new();
    for chunk in &chunks {
        chunk.write_to(&mut writer)?;
    }
    let bits = writer.len_bits();
    write_file(&args.output, writer.finish().as_bytes())?;
    if args.bits_out {
        println!("{bits}");
    }
    eprintln!("decoded {} chunks ({bits} bits)", chunks.len());
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let spec = CodeSpec::hamming(args.m, args.k_mode.into())?;
    let n = spec.n() as u32;
    let x = args.active;
    let y = spec.y_size();
    if args.c_max < 1 {
        return Err(CliError::Usage("--c-max must be at least 1".into()));
    }
    if args.c_max > gdedup::analysis::MAX_BOUND_CHUNKS {
        return Err(CliError::Data(
            gdedup::Error::ChunkCountTooLarge(args.c_max).to_string(),
        ));
    }
    if x == 0 || (spec.codeword_count_log2() < 64 && x > 1 << spec.codeword_count_log2()) {
        return Err(CliError::Usage("--active must fit the codeword count".into()));
    }
    let mut gen_acc = ThetaAccumulator::new(x, y, spec.k() as u32);
    let mut classic_acc = ThetaAccumulator::new(x * y, 1, n);
    let mut out = String::new();
    let k_mode = match spec.k_mode() {
        KMode::Full => "full",
        KMode::Compact => "compact",
    };
    let _ = writeln!(out, "# m={}, active={}, k_mode={k_mode}", args.m, x);
    let _ = writeln!(
        out,
        "C,theta_L_gen,theta_U_gen,theta_L_classic,theta_U_classic,ratio_lower,ratio_upper"
    );
    for c in 1..=args.c_max {
        let (gl, gu) = gen_acc.step();
        let (dl, du_raw) = classic_acc.step();
        let du = du_raw - c as f64;
        let _ = writeln!(
            out,
            "{c},{gl:.9},{gu:.9},{dl:.9},{du:.9},{:.9},{:.9}",
            dl / gu,
            du / gl
        );
    }
    write_file(&args.out, out.as_bytes())?;
    eprintln!("wrote {} bound rows to {}", args.c_max, args.out.display());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let source = build_source(args.m, args.active, args.seed)?;
    let mut cfg = ExperimentConfig::new(source, args.chunks, args.trials);
    cfg.k_mode = args.k_mode.into();
    cfg.baseline = args.baseline;
    let table = run_experiment(&cfg)?;
    export_csv(&table, &args.out)?;
    eprintln!(
        "simulated {} trials of {} chunks, {} rows written to {}",
        args.trials,
        args.chunks,
        table.rows.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let records = sweep_chunk_length(
        &args.m,
        args.active,
        args.trials,
        args.chunks,
        args.seed,
        args.k_mode.into(),
    )?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# active={}, trials={}, seed={}, c_max={}",
        args.active, args.trials, args.seed, args.chunks
    );
    let _ = writeln!(out, "m,n,max_ratio,argmax_C");
    for r in &records {
        let _ = writeln!(out, "{},{},{:.9},{}", r.m, r.n, r.max_ratio, r.argmax_c);
    }
    write_file(&args.out, out.as_bytes())?;
    eprintln!("swept {} chunk lengths into {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let table = parse_csv(&text)?;
    let paths = emit_plot(&table, &args.out_prefix)?;
    for path in paths {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
