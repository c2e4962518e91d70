//! `qnf`: simulate noisy quantum transmitters, fingerprint them, and run
//! constellation authentication experiments.
//!
//! Exit codes: 0 on success (and on an authentication Accept), 1 on Reject,
//! 2 on usage, configuration, or data errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qnf",
    version,
    about = "Quantum-noise fingerprint authentication simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one device's measurement histogram
    Simulate(SimulateArgs),
    /// Train a fingerprint from a measurement histogram
    Fingerprint(FingerprintArgs),
    /// Match observed counts against stored fingerprints
    Authenticate(AuthenticateArgs),
    /// Pairwise KL-divergence matrix over stored fingerprints
    Matrix(MatrixArgs),
    /// Run a full constellation experiment from a config file or preset
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Qubits per entangled batch
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Number of shots to sample
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// P(read 1 | true 0): one value for all qubits, or n comma-separated
    #[arg(long, default_value = "0")]
    eps01: String,
    /// P(read 0 | true 1): one value for all qubits, or n comma-separated
    #[arg(long, default_value = "0")]
    eps10: String,
    /// Depolarizing probability per single-qubit gate
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    /// Depolarizing probability per two-qubit gate
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    /// Realize the device by drawing parameters from the default ranges
    /// keyed by this seed (overrides the explicit parameters)
    #[arg(long)]
    device_seed: Option<u64>,
    /// Histogram CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FingerprintArgs {
    /// Training histogram CSV
    #[arg(long)]
    counts: PathBuf,
    /// Identity the fingerprint belongs to
    #[arg(long)]
    node_id: u32,
    /// Smoothing pseudocount per bin
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Scoring domain: error-only | full
    #[arg(long, default_value = "error-only")]
    domain: String,
    /// Fingerprint JSON destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuthenticateArgs {
    /// Observed histogram CSV
    #[arg(long)]
    counts: PathBuf,
    /// Fingerprint JSON files to match against
    #[arg(long, num_args = 1.., required = true)]
    profiles: Vec<PathBuf>,
    /// Scoring rule: min-kl | multinomial
    #[arg(long, default_value = "min-kl")]
    mode: String,
    /// Scoring domain; must match the profiles (defaults to theirs)
    #[arg(long)]
    domain: Option<String>,
    /// Rejection threshold θ (nats for min-kl, per-shot log-likelihood
    /// units for multinomial); 0 accepts only exact matches
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Smoothing pseudocount for the observed counts (defaults to the
    /// profiles' alpha)
    #[arg(long)]
    alpha: Option<f64>,
    /// Claimed identity: accept only if the classifier decides this id
    #[arg(long)]
    claimed: Option<u32>,
}

#[derive(Args)]
struct MatrixArgs {
    /// Fingerprint JSON files
    #[arg(long, num_args = 1.., required = true)]
    profiles: Vec<PathBuf>,
    /// Matrix CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config: table1-analog | fig4-analog | mitm-analog
    #[arg(long)]
    preset: Option<String>,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Artifact directory
    #[arg(long, default_value = "qnf-out")]
    out: PathBuf,
    /// Override the classifier mode: min-kl | multinomial
    #[arg(long)]
    mode: Option<String>,
    /// Override the scoring domain: error-only | full
    #[arg(long)]
    domain: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Fingerprint(args) => commands::fingerprint(args),
        Command::Authenticate(args) => commands::authenticate(args),
        Command::Matrix(args) => commands::matrix(args),
        Command::Experiment(args) => commands::experiment(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
