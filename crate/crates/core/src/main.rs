use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfid::cli::{run, Command, RunConfig};
use qfid::input::EstimatorKind;

/// Average gate fidelity of qubit channels and composite-pulse robustness sweeps.
#[derive(Parser, Debug)]
#[command(name = "qfid", version, about)]
struct Cli {
    /// Override the Monte Carlo seed given in the input file.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Average fidelity of a channel against a target, plus the six cardinal-state fidelities.
    Fidelity {
        #[command(flatten)]
        common: Common,
        /// Estimator: six_state, pauli, tetrahedron, quadrature or monte_carlo.
        #[arg(long, value_parser = parse_estimator)]
        estimator: Option<EstimatorKind>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Cross-check every estimator against the six-state value; exits 4 on disagreement.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Sweep pulse-length and off-resonance errors of a pulse sequence, writing CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Input JSON file.
    input: PathBuf,
    /// Write the result here (atomically) instead of stdout.
    #[arg(short = 'o', long = "output", value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Tuning {
    /// Gauss-Legendre nodes in theta for the quadrature estimator.
    #[arg(long, value_name = "N")]
    n_theta: Option<usize>,
    /// Uniform nodes in phi for the quadrature estimator.
    #[arg(long, value_name = "N")]
    n_phi: Option<usize>,
    /// Sample count for the Monte Carlo estimator.
    #[arg(long, value_name = "N")]
    samples: Option<u64>,
}

fn parse_estimator(s: &str) -> Result<EstimatorKind, String> {
    EstimatorKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = EstimatorKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown estimator `{s}` (expected one of: {})", names.join(", "))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, estimator, tuning) = match cli.command {
        Sub::Fidelity { common, estimator, tuning } => (Command::Fidelity, common, estimator, Some(tuning)),
        Sub::Verify { common, tuning } => (Command::Verify, common, None, Some(tuning)),
        Sub::Sweep { common } => (Command::Sweep, common, None, None),
    };
    let mut config = RunConfig::new(command, common.input);
    config.output_path = common.output;
    config.estimator = estimator;
    config.seed = cli.seed;
    config.quiet = cli.quiet;
    if let Some(t) = tuning {
        config.n_theta = t.n_theta;
        config.n_phi = t.n_phi;
        config.samples = t.samples;
    }
    ExitCode::from(run(&config) as u8)
}
