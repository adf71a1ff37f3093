use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use itfs::cli::{run_bench, run_select, BenchConfig, Binning, CliError, Format, RunConfig};
use itfs::{CriterionKind, LogBase};

#[derive(Parser)]
#[command(name = "itfs", version, about = "Information-theoretic feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select features from a CSV or LibSVM file.
    Select(SelectArgs),
    /// Time the pipeline over a grid of synthetic datasets.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Libsvm,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningArg {
    None,
    EqualWidth,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Nats,
    Bits,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Dense,
    Sparse,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value = "mrmr")]
    criterion: String,
    #[arg(long)]
    ns: usize,
    #[arg(long)]
    npart: Option<usize>,
    /// MIFS redundancy weight.
    #[arg(long)]
    beta: Option<f64>,
    /// 0-based class column for CSV input; last column when omitted.
    #[arg(long)]
    label_position: Option<usize>,
    #[arg(long, value_enum, default_value = "none")]
    binning: BinningArg,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, env = "ITFS_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "nats")]
    unit: UnitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    m: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    cardinality: u32,
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', env = "ITFS_WORKERS")]
    workers: Option<Vec<usize>>,
    #[arg(long)]
    npart: Option<usize>,
    #[arg(long, default_value = "mrmr")]
    criterion: String,
    #[arg(long, value_enum, default_value = "dense")]
    layout: LayoutArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_criterion(s: &str) -> Result<CriterionKind, CliError> {
    s.parse().map_err(CliError::from)
}

fn select(args: SelectArgs) -> Result<(), CliError> {
    let mut config = RunConfig::new(
        args.input,
        match args.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Libsvm => Format::Libsvm,
        },
        parse_criterion(&args.criterion)?,
        args.ns,
    );
    config.npart = args.npart;
    config.beta = args.beta;
    config.label_position = args.label_position;
    config.binning = match args.binning {
        BinningArg::None => Binning::None,
        BinningArg::EqualWidth => Binning::EqualWidth(args.bins),
    };
    config.workers = args.workers.unwrap_or_else(default_workers);
    config.output = args.output;
    config.unit = match args.unit {
        UnitArg::Nats => LogBase::Nats,
        UnitArg::Bits => LogBase::Bits,
    };
    config.seed = args.seed;
    run_select(&config).map(|_| ())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let config = BenchConfig {
        seed: args.seed,
        m: args.m,
        n: args.n,
        cardinality: args.cardinality,
        density: args.density,
        ns: args.ns,
        workers: args.workers.unwrap_or_else(|| vec![default_workers()]),
        npart: args.npart,
        criterion: parse_criterion(&args.criterion)?,
        sparse: matches!(args.layout, LayoutArg::Sparse),
        output: args.output,
    };
    run_bench(&config).map(|_| ())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Select(args) => select(args),
        Command::Bench(args) => bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("itfs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
