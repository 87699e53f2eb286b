//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::circuit::{
    cancel_adjacent_pairs, emit_qasm, emit_qasm_measured, transpile_to_basis, Circuit,
};
use crate::experiment::{
    self, aggregate_by, derive_seed, read_report_file, run_message, write_aggregates, write_report,
    write_zero_fraction, zero_fraction_analysis, GroupKey, RunSettings, DEFAULT_LENGTHS,
    DEFAULT_SHOTS,
};
use crate::noise::NoiseModel;
use crate::protocol::{build_full, decode_outcome, encode_message, Message, ProtocolError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "superdense",
    version,
    about = "n-bit superdense coding over GHZ states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the encoding circuit for a message, with gate counts and depth.
    Encode(EncodeArgs),
    /// Check the noiseless round trip of every message up to --max-n bits.
    Verify(VerifyArgs),
    /// Run one message under the noise model.
    Run(RunArgs),
    /// Run every message of the given length(s) and write a CSV.
    Sweep(SweepArgs),
    /// Aggregate a sweep CSV.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Qasm,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportBy {
    GateCount,
    Depth,
    ZeroFraction,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// JSON noise configuration; absent keys take the built-in defaults.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Enable idle T1/T2 decay per circuit layer.
    #[arg(long)]
    pub idle_decay: bool,
    /// Cancel adjacent self-inverse pairs after transpiling.
    #[arg(long)]
    pub cancel: bool,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub message: String,
    /// Print the whole protocol circuit instead of the encoder alone.
    #[arg(long)]
    pub full: bool,
    /// Print the basis-transpiled circuit.
    #[arg(long)]
    pub transpiled: bool,
    /// Cancel adjacent self-inverse pairs in the printed circuit.
    #[arg(long)]
    pub cancel: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub message: String,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Message length; defaults to 4, 6, 8 and 10 in one file.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub by: ReportBy,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => EXIT_FAILURE,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_message(n: Option<usize>, text: &str) -> Result<Message, CliError> {
    let message: Message = text.parse().map_err(usage)?;
    match n {
        Some(n) if n != message.len() => Err(usage(format!(
            "message '{text}' has {} bits but --n is {n}",
            message.len()
        ))),
        _ => Ok(message),
    }
}

fn settings(args: &NoiseArgs) -> Result<RunSettings, CliError> {
    if args.shots == 0 {
        return Err(usage("--shots must be at least 1"));
    }
    let mut model = match &args.noise {
        Some(path) => {
            NoiseModel::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => NoiseModel::default(),
    };
    if args.idle_decay {
        model.idle_decay_enabled = true;
    }
    Ok(RunSettings {
        shots: args.shots,
        model,
        cancel_pairs: args.cancel,
    })
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn describe(circuit: &Circuit, label: &str) -> String {
    format!(
        "{label} gates: {}\n{label} depth: {}\n",
        circuit.gate_counts(),
        circuit.depth()
    )
}

fn cmd_encode(
    args: &EncodeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let message = parse_message(args.n, &args.message)?;
    let raw = if args.full {
        build_full(&message).map_err(usage)?.full
    } else {
        encode_message(&message).map_err(usage)?
    };
    let transpiled = transpile_to_basis(&raw);
    let mut shown = if args.transpiled {
        transpiled.clone()
    } else {
        raw.clone()
    };
    if args.cancel {
        shown = cancel_adjacent_pairs(&shown);
    }
    let summary = format!(
        "{}{}",
        describe(&raw, "raw"),
        describe(&transpiled, "transpiled")
    );

    match args.format {
        Format::Qasm => {
            let text = if args.full {
                emit_qasm_measured(&shown)
            } else {
                emit_qasm(&shown)
            };
            emit(&args.out, &text, stdout)?;
            stderr.write_all(summary.as_bytes())?;
        }
        Format::Text => {
            let stage = if args.full { "protocol" } else { "encoder" };
            let mut text = format!(
                "message {message} (n = {})\n{stage} circuit:\n",
                message.len()
            );
            for g in shown.gates() {
                let _ = writeln!(text, "  {g}");
            }
            text.push_str(&summary);
            emit(&args.out, &text, stdout)?;
        }
        Format::Csv => return Err(usage("encode supports --format text or qasm")),
    }
    Ok(())
}

/// Decoder used by `verify`: basis index and register width to message.
pub type Decoder = fn(usize, usize) -> Result<Message, ProtocolError>;

/// Noiseless round trip of every message for n in 2..=max_n, decoding with
/// `decode`. Returns (passed, total, failing messages).
pub fn verify_round_trips(
    max_n: usize,
    decode: Decoder,
    report: &mut String,
) -> (u64, u64, Vec<String>) {
    let (mut passed, mut total) = (0u64, 0u64);
    let mut failures = Vec::new();
    for n in 2..=max_n {
        let mut ok = 0u64;
        for message in Message::all(n).expect("n within message bounds") {
            let pc = build_full(&message).expect("valid message");
            let state = pc.full.simulate().expect("valid circuit");
            let (index, p) = state.dominant_basis_state();
            let good = p >= 1.0 - 1e-9 && decode(index, n).as_ref() == Ok(&message);
            if good {
                ok += 1;
            } else {
                failures.push(message.to_string());
            }
        }
        let count = 1u64 << n;
        let _ = writeln!(report, "n={n}: {ok}/{count} passed");
        passed += ok;
        total += count;
    }
    (passed, total, failures)
}

pub fn cmd_verify_with(
    args: &VerifyArgs,
    decode: Decoder,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if !(2..=10).contains(&args.max_n) {
        return Err(usage(format!(
            "--max-n must be in 2..=10, got {}",
            args.max_n
        )));
    }
    let mut report = String::new();
    let (passed, total, failures) = verify_round_trips(args.max_n, decode, &mut report);
    let _ = writeln!(report, "{passed}/{total} passed");
    for f in &failures {
        let _ = writeln!(report, "FAILED: {f}");
    }
    stdout.write_all(report.as_bytes())?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {total} round trips failed",
            failures.len()
        )))
    }
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let message = parse_message(args.n, &args.message)?;
    let settings = settings(&args.noise)?;
    let seed = derive_seed(args.noise.seed, message.len(), message.value());
    let (record, counts) = run_message(&message, &settings, seed).map_err(usage)?;

    let text = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_report(std::slice::from_ref(&record), &mut buf).map_err(usage)?;
            String::from_utf8(buf).expect("csv output is UTF-8")
        }
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "message: {message} (n = {}, decimal {})",
                record.n,
                record.decimal_value()
            );
            let _ = writeln!(t, "seed: {}", record.seed);
            let _ = writeln!(t, "shots: {}", record.shots);
            let _ = writeln!(t, "encoder gates (raw): {}", record.encoder_gates_raw);
            let _ = writeln!(t, "transpiled gates: {}", record.total_gates_transpiled);
            let _ = writeln!(t, "transpiled depth: {}", record.depth_transpiled);
            let _ = writeln!(t, "successes: {}", record.successes);
            let _ = writeln!(t, "success rate: {:.6}", record.success_rate());
            let _ = writeln!(t, "outcomes (measured -> decoded: count):");
            for (outcome, c) in counts.iter() {
                let decoded = decode_outcome(outcome, record.n).expect("width checked");
                let _ = writeln!(t, "  {} -> {decoded}: {c}", counts.outcome_string(outcome));
            }
            t
        }
        Format::Qasm => return Err(usage("run supports --format text or csv")),
    };
    emit(&args.out, &text, stdout)
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let settings = settings(&args.noise)?;
    let lengths: Vec<usize> = match args.n {
        Some(n) => vec![n],
        None => DEFAULT_LENGTHS.to_vec(),
    };
    let mut records = Vec::new();
    for n in lengths {
        records.extend(experiment::sweep(n, &settings, args.noise.seed).map_err(usage)?);
    }
    let mut buf = Vec::new();
    write_report(&records, &mut buf).map_err(usage)?;
    emit(
        &args.out,
        std::str::from_utf8(&buf).expect("csv output is UTF-8"),
        stdout,
    )
}

fn cmd_report(args: &ReportArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let records = read_report_file(&args.input)
        .map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
    if records.is_empty() {
        return Err(usage(format!("{}: no records", args.input.display())));
    }
    let mut buf = Vec::new();
    match args.by {
        ReportBy::ZeroFraction => {
            let rows = zero_fraction_analysis(&records).map_err(usage)?;
            write_zero_fraction(&rows, &mut buf).map_err(usage)?;
        }
        ReportBy::GateCount | ReportBy::Depth => {
            let key = if args.by == ReportBy::Depth {
                GroupKey::Depth
            } else {
                GroupKey::GateCount
            };
            let mut by_n: BTreeMap<usize, Vec<_>> = BTreeMap::new();
            for r in records {
                by_n.entry(r.n).or_default().push(r);
            }
            let groups = by_n
                .into_iter()
                .map(|(n, recs)| aggregate_by(&recs, key).map(|rows| (n, rows)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            write_aggregates(&groups, &mut buf).map_err(usage)?;
        }
    }
    emit(
        &args.out,
        std::str::from_utf8(&buf).expect("csv output is UTF-8"),
        stdout,
    )
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Encode(a) => cmd_encode(a, stdout, stderr),
        Command::Verify(a) => cmd_verify_with(a, decode_outcome, stdout),
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Report(a) => cmd_report(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("superdense").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn encode_outputs() {
        let (code, out, _) = run_args(&["encode", "--n", "4", "--message", "0000"]);
        assert_eq!(code, 0);
        assert!(out.contains("raw gates: total=0"), "{out}");

        let (code, out, err) = run_args(&[
            "encode",
            "--n",
            "4",
            "--message",
            "1111",
            "--full",
            "--format",
            "qasm",
        ]);
        assert_eq!(code, 0);
        let parsed = crate::circuit::parse_qasm(&out).unwrap();
        assert_eq!(parsed.len(), 8 + 6);
        assert!(err.contains("raw gates: total=14"), "{err}");

        assert_eq!(
            run_args(&["encode", "--n", "4", "--message", "201"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_args(&["encode", "--n", "5", "--message", "1010"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn verify_small() {
        let (code, out, _) = run_args(&["verify", "--max-n", "2"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "4/4 passed"), "{out}");
        assert_eq!(run_args(&["verify", "--max-n", "11"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_detects_a_wrong_mapping() {
        fn swapped(outcome: usize, n: usize) -> Result<Message, ProtocolError> {
            // Reads the register in plain qubit order, which is not the protocol's mapping.
            let bits = (0..n).map(|k| (outcome >> k) & 1 == 1).collect();
            Message::from_bits(bits)
        }
        let mut out = Vec::new();
        let err = cmd_verify_with(&VerifyArgs { max_n: 4 }, swapped, &mut out).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_FAILURE);
        assert!(String::from_utf8(out).unwrap().contains("FAILED"));
    }
}
