use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use louvain::cli::{cmd_bench, cmd_run, cmd_scale, CliError, InputFormat, RunConfig};
use louvain::LouvainParams;

/// Parallel Louvain community detection on CSR graphs.
#[derive(Parser)]
#[command(name = "louvain", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities once; write a membership file and a report
    Run(RunArgs),
    /// Repeat detection and report geometric-mean runtime
    Bench(BenchArgs),
    /// Sweep thread counts and emit a CSV table of time splits
    Scale(ScaleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input graph file
    #[arg(long)]
    input: PathBuf,

    /// Input file format
    #[arg(long, value_enum, default_value_t = Format::Mtx)]
    format: Format,

    /// Read edge weights from the third edge-list column
    #[arg(long)]
    weighted: bool,

    /// Maximum number of passes
    #[arg(long, default_value_t = LouvainParams::default().max_passes)]
    max_passes: usize,

    /// Maximum local-moving iterations per pass
    #[arg(long, default_value_t = LouvainParams::default().max_iterations)]
    max_iterations: usize,

    /// Initial local-moving convergence tolerance
    #[arg(long, default_value_t = LouvainParams::default().initial_tolerance)]
    tolerance: f64,

    /// Factor the tolerance drops by after each pass
    #[arg(long, default_value_t = LouvainParams::default().tolerance_drop)]
    tolerance_drop: f64,

    /// Stop when communities/vertices stays at or above this ratio
    #[arg(long, default_value_t = LouvainParams::default().aggregation_tolerance)]
    aggregation_tolerance: f64,

    /// Vertices per dynamically claimed work chunk
    #[arg(long, default_value_t = LouvainParams::default().chunk_size)]
    chunk_size: usize,

    /// Disable vertex pruning
    #[arg(long)]
    no_pruning: bool,

    /// Accepted for compatibility; detection uses no random seed
    #[arg(long, hide = true)]
    seedless: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Mtx,
    Edgelist,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Worker threads (1 = deterministic sequential mode)
    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Membership output file (`vertex community` per line)
    #[arg(long, default_value = "membership.txt")]
    output: PathBuf,

    /// Report output file (`key: value` per line)
    #[arg(long, default_value = "report.txt")]
    report: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Worker threads (1 = deterministic sequential mode)
    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Number of measured repetitions
    #[arg(long, default_value_t = 5)]
    repeats: usize,

    /// Also write the report to this file
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Comma-separated thread counts to sweep
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    threads: Vec<usize>,

    /// Measured repetitions per thread count
    #[arg(long, default_value_t = 5)]
    repeats: usize,

    /// Also write the CSV table to this file
    #[arg(long)]
    report: Option<PathBuf>,
}

impl CommonArgs {
    fn config(&self, threads: usize) -> RunConfig {
        RunConfig {
            input: self.input.clone(),
            format: match self.format {
                Format::Mtx => InputFormat::MatrixMarket,
                Format::Edgelist => InputFormat::EdgeList,
            },
            weighted: self.weighted,
            params: LouvainParams {
                max_passes: self.max_passes,
                max_iterations: self.max_iterations,
                initial_tolerance: self.tolerance,
                tolerance_drop: self.tolerance_drop,
                aggregation_tolerance: self.aggregation_tolerance,
                chunk_size: self.chunk_size,
                thread_count: threads,
                pruning: !self.no_pruning,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let mut stdout = std::io::stdout();
    let outcome: Result<(), CliError> = match &cli.command {
        Command::Run(args) => cmd_run(
            &args.common.config(args.threads),
            &args.output,
            &args.report,
            &mut stdout,
        ),
        Command::Bench(args) => cmd_bench(
            &args.common.config(args.threads),
            args.repeats,
            args.report.as_deref(),
            &mut stdout,
        )
        .map(|_| ()),
        Command::Scale(args) => cmd_scale(
            &args.common.config(1),
            &args.threads,
            args.repeats,
            args.report.as_deref(),
            &mut stdout,
        ),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
