//! The `swapfl` command line: dataset generation, p-median solving,
//! facility relocation, benchmarking, ILP export, expert recording, the
//! environment server and scaling-law checks.

mod commands;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swapfl_core::instance::InstanceError;
use swapfl_core::swap::SwapError;
use swapfl_core::{PmpError, DEFAULT_EXACT_CAP};

pub use report::{BenchReport, BenchRow, Metric};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;

/// Environment variable holding the default policy server endpoint.
pub const ENDPOINT_ENV: &str = "SWAPFL_ENDPOINT";

#[derive(Debug, Parser)]
#[command(
    name = "swapfl",
    version,
    about = "Swap-based p-median and facility relocation solvers"
)]
#[command(
    after_help = "Exit codes: 0 success, 1 usage error, 2 infeasible or oracle cap exceeded, 3 protocol error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Grid,
    Gabriel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Pmp,
    Frp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Density,
    Random,
}

/// Facility relocation agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelocMethod {
    #[value(alias = "greedy-swap")]
    Greedy,
    Vsca,
    #[value(alias = "random-swap")]
    Random,
    Policy,
}

/// p-median methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Exact,
    #[value(alias = "greedy")]
    GreedySwap,
    Vsca,
    RandomSwap,
    Policy,
    GreedyAddition,
    #[value(alias = "kmeans")]
    KMeans,
    Maranzana,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Policy server for `--method policy` (tcp://host:port)
    #[arg(long, env = ENDPOINT_ENV)]
    pub endpoint: Option<String>,
    /// Seconds to wait for each policy reply
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic instances with sequential seeds
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Grid side length (grid cities)
        #[arg(long, default_value_t = 8)]
        width: usize,
        /// Number of nodes (Gabriel graphs)
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Fixed number of business districts, 1 to 3 (random if omitted)
        #[arg(long)]
        cbds: Option<u8>,
        /// Nearest neighbours used to augment Gabriel graphs
        #[arg(long, default_value_t = 3)]
        knn: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Seed of the first instance
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Relocate at most k facilities of an existing layout
    Relocate {
        #[arg(long)]
        instance: PathBuf,
        /// Number of facilities in the density-sampled initial layout
        #[arg(long, required_unless_present = "f0")]
        p: Option<usize>,
        /// Explicit initial layout, comma separated (overrides --p)
        #[arg(long, value_delimiter = ',')]
        f0: Option<Vec<usize>>,
        /// Relocation budget (default floor(p/2), at least 1)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "greedy")]
        method: RelocMethod,
        #[arg(short = 'T', long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Solve the p-median problem from scratch
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value = "greedy-swap")]
        method: SolveMethod,
        #[arg(short = 'T', long, default_value_t = 5)]
        trials: usize,
        /// Swap budget per trial (default p)
        #[arg(short = 'S', long)]
        swaps: Option<usize>,
        #[arg(long, value_enum, default_value = "density")]
        init: InitKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of candidate sets the exact oracle will consider
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: u64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run methods over a corpus directory and report mean gap or Q
    Bench {
        /// Directory of instance files
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "pmp")]
        task: Task,
        /// Comma separated methods (default: all for the task, except policy)
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        p: usize,
        /// Relocation budget for frp (default floor(p/2))
        #[arg(long)]
        k: Option<usize>,
        #[arg(short = 'T', long, default_value_t = 5)]
        trials: usize,
        #[arg(short = 'S', long)]
        swaps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: u64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Also write the JSON rows to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the p-median integer program in CPLEX LP format
    ExportIlp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Record Greedy-swap rollouts as expert trajectories
    RecordExpert {
        /// Directory of instance files
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the environment protocol over TCP or standard streams
    Serve {
        /// Address to listen on
        #[arg(long, default_value = "127.0.0.1:7070", conflicts_with = "stdio")]
        listen: String,
        /// Serve one session on stdin/stdout instead
        #[arg(long)]
        stdio: bool,
    },
    /// Solve, then regress facility density on demand density per cell
    VerifyScaling {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value = "greedy-swap")]
        method: SolveMethod,
        #[arg(short = 'T', long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

/// Maps an error to the documented exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<InstanceError>() {
            if matches!(e, InstanceError::CombinationCap { .. }) {
                return EXIT_INFEASIBLE;
            }
        }
        if let Some(e) = cause.downcast_ref::<SwapError>() {
            if matches!(e, SwapError::Protocol(_) | SwapError::Connect { .. }) {
                return EXIT_PROTOCOL;
            }
        }
        if let Some(PmpError::Swap(SwapError::Protocol(_) | SwapError::Connect { .. })) =
            cause.downcast_ref::<PmpError>()
        {
            return EXIT_PROTOCOL;
        }
    }
    EXIT_USAGE
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    commands::dispatch(cli.command, out)
}

/// Parses `args` and runs the command, returning the exit code. Errors are
/// reported on stderr.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
