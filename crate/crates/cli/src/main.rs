use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "photonet", version, about = "Few-photon W-state networks: generation, witness scans and teleportation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Replaces the per-claim tolerances of `verify`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct WSource {
    /// Symmetric W state on N modes.
    #[arg(long, value_name = "N")]
    symmetric: Option<usize>,
    /// Real coefficient moduli, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Splitter angles and simulated amplitudes of a W state.
    Wstate {
        #[command(flatten)]
        source: WSource,
        /// Optional coefficient phases in radians, one per mode.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phases: Option<Vec<String>>,
    },
    /// Pairwise entanglement test on every pair of modes.
    WitnessScan {
        #[command(flatten)]
        source: WSource,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        eta: Vec<String>,
        #[arg(long, default_value = "number-resolving")]
        detector: String,
    },
    /// Teleportation fidelity and probability over a parameter grid.
    Teleport(commands::TeleportArgs),
    /// Runs every cross-check and exits nonzero if any fails.
    Verify {
        /// Monte Carlo samples for the Bloch-sphere check.
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
    },
}

pub enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(j) = cli.common.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let common = &cli.common;
    match cli.command {
        Command::Wstate { source, phases } => commands::wstate(common, &source, phases.as_deref()),
        Command::WitnessScan { source, eta, detector } => commands::witness_scan(common, &source, &eta, &detector),
        Command::Teleport(args) => commands::teleport(common, &args),
        Command::Verify { mc_samples } => commands::verify(common, mc_samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
