//! `overdet`: experiments on overdetermined free-boundary problems.
//!
//! Exit status: 0 on success, 1 on numerical failure, 2 on usage or
//! configuration errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, Outcome};
use config::ExperimentConfig;
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "overdet", version, about = "Free-boundary experiments on perturbed annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV/JSON outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker threads for independent sweep points.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Reserved; every algorithm is deterministic. Echoed into provenance.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tabulate the Fourier multipliers for modes 1..=K.
    Multipliers,
    /// Compare finite-difference derivatives of the residual with the multipliers.
    VerifyLinearization,
    /// Solve for the free boundary.
    Solve,
    /// Measure the remainder of the first-order prediction.
    Asymptotics,
    /// Check that reflection symmetry of the inner curve is inherited.
    Symmetry,
    /// Tabulate the resonance conductivities.
    SigmaTable,
    /// Notch experiment: convex outer curve around a nonconvex inner region.
    Counterexample,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Multipliers => "multipliers",
            Command::VerifyLinearization => "verify-linearization",
            Command::Solve => "solve",
            Command::Asymptotics => "asymptotics",
            Command::Symmetry => "symmetry",
            Command::SigmaTable => "sigma-table",
            Command::Counterexample => "counterexample",
        }
    }

    /// Commands that need a planar boundary-value solve.
    fn planar(self) -> bool {
        !matches!(self, Command::Multipliers | Command::SigmaTable)
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(anyhow::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "output error: {e:#}"),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <PATH> is required".into()))?;
    let config = ExperimentConfig::load(path).map_err(CliError::Config)?;
    if cli.command.planar() {
        commands::require_planar(&config)?;
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure workers: {e}")))?;
    }
    let mut out = OutputDir::create(&cli.out).map_err(CliError::Io)?;
    let mut ctx = Ctx {
        command: cli.command.name(),
        config: &config,
        out: &mut out,
        seed: cli.seed,
    };
    let outcome = match cli.command {
        Command::Multipliers => commands::multipliers(&mut ctx),
        Command::VerifyLinearization => commands::verify_linearization(&mut ctx),
        Command::Solve => commands::solve(&mut ctx),
        Command::Asymptotics => commands::asymptotics(&mut ctx),
        Command::Symmetry => commands::symmetry(&mut ctx),
        Command::SigmaTable => commands::sigma_table(&mut ctx),
        Command::Counterexample => commands::counterexample(&mut ctx),
    }?;
    for p in out.written() {
        log::info!("wrote {}", p.display());
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: numerical check failed", cli.command.name());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
