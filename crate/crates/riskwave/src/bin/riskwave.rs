use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use riskwave::cli::{self, CliError, Command};
use riskwave::config::{parse_config, ConfigIssue};
use riskwave::dispersion::WeightPolicy;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Validate,
    Steady,
    Dispersion,
    Modes,
    Field,
    Aggregate,
    Trajectory,
    Simulate,
    Kinetic,
}

impl From<CommandArg> for Command {
    fn from(value: CommandArg) -> Command {
        match value {
            CommandArg::Validate => Command::Validate,
            CommandArg::Steady => Command::Steady,
            CommandArg::Dispersion => Command::Dispersion,
            CommandArg::Modes => Command::Modes,
            CommandArg::Field => Command::Field,
            CommandArg::Aggregate => Command::Aggregate,
            CommandArg::Trajectory => Command::Trajectory,
            CommandArg::Simulate => Command::Simulate,
            CommandArg::Kinetic => Command::Kinetic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    #[value(name = "minimal-norm")]
    MinimalNorm,
    #[value(name = "pin-zero")]
    PinZero,
}

/// Surface-like financial waves on a 2-D risk space: steady states,
/// dispersion analysis, wave fields, particle aggregation and a
/// time-domain cross-check simulator.
#[derive(Debug, Parser)]
#[command(name = "riskwave", version)]
struct Args {
    /// Analysis to run.
    #[arg(value_enum)]
    command: CommandArg,
    /// Path to the flat sectioned key=value configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files and metadata sidecars.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override of the mode weight policy.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// Override of the real/complex classification tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn run(args: Args) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = parse_config(&text).map_err(|e| CliError::Config(e.issues))?;
    if let Some(policy) = args.policy {
        cfg.mode.policy = match policy {
            PolicyArg::MinimalNorm => WeightPolicy::MinimalNorm,
            PolicyArg::PinZero => WeightPolicy::PinSecondaryZero,
        };
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(CliError::Config(vec![ConfigIssue {
                line: 0,
                message: format!("--tol must be positive, got {tol}"),
            }]));
        }
        cfg.mode.tol = tol;
    }
    cli::execute(&cfg, args.command.into(), &args.out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(files) => {
            for file in files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("riskwave: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
