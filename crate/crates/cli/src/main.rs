//! `qwl`: reports for logical-qudit witnesses, LHV bounds, correlation
//! tables, continuous-variable checks and stabilizer maps.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "qwl", version, about = "Logical-qudit witness laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

/// Flags shared by every command; each command reads the ones it needs.
#[derive(Args, Debug, Clone)]
pub struct Params {
    /// Qudit dimension
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Number of parties (sites)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Witness threshold c
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Squeezing parameter
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Fock cutoff per mode
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Operator power
    #[arg(long, global = true)]
    pub power: Option<u32>,
    /// Resolution weights, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    /// Seed for randomized searches
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random starts for the product-state search
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// State: uniform, basis0, mixed, ghz, or a JSON file {dims, amplitudes}
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Fourth product of the tripartite family
    #[arg(long, global = true, value_enum, default_value_t = FourthArg::Yyx)]
    pub fourth: FourthArg,
    /// Branch of ω^{1/2} used in Y
    #[arg(long, global = true, value_enum, default_value_t = BranchArg::Principal)]
    pub branch: BranchArg,
    /// Swap two coset labels before checking the homomorphism
    #[arg(long, global = true)]
    pub corrupt: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FourthArg {
    Yyx,
    Yyy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BranchArg {
    Principal,
    Opposite,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a witness and evaluate it on a state
    Witness {
        #[arg(value_enum)]
        target: WitnessTarget,
    },
    /// Exhaustive local-hidden-variable analysis
    Lhv {
        #[arg(value_enum)]
        target: LhvTarget,
    },
    /// Regenerate one of the correlation tables
    Tables {
        #[arg(long)]
        id: u8,
    },
    /// Two-mode squeezed vacuum checks
    Cv {
        #[arg(value_enum)]
        target: CvTarget,
    },
    /// Stabilizer groups and the coset homomorphism
    Stabilizer {
        #[command(subcommand)]
        action: StabilizerAction,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WitnessTarget {
    Coherence,
    TwoQutrit,
    ThreeQutrit,
    GhzTripartite,
    Slk,
    BasisPair,
    SeparableBound,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LhvTarget {
    MaxTripartite,
    MaxSlk,
    Hardy,
    HigherPower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CvTarget {
    DuanSimon,
    VarianceGrid,
    LogicalCoherence,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum StabilizerAction {
    /// Group construction, normality and homomorphism checks
    Verify,
    /// Element list with exponents and coset labels
    Export,
}

fn configure_threads() -> Result<(), commands::Failure> {
    let Ok(raw) = std::env::var("QWL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| commands::Failure::usage(format!("QWL_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| commands::Failure::Compute(e.into()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), commands::Failure> {
    configure_threads()?;
    let p = &cli.params;
    let report = match cli.command {
        Command::Witness { target } => commands::witness(target, p)?,
        Command::Lhv { target } => commands::lhv(target, p)?,
        Command::Tables { id } => commands::tables(id, p)?,
        Command::Cv { target } => commands::cv(target, p)?,
        Command::Stabilizer { action } => commands::stabilizer(action, p)?,
    };
    let mut sink: Box<dyn Write> = match &p.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| commands::Failure::Compute(e.into()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    output::render(&report, p.format, &mut sink).map_err(commands::Failure::Compute)?;
    sink.flush().map_err(|e| commands::Failure::Compute(e.into()))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
