//! `exdep`: seeded experiments emitting plot-ready CSV and JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "exdep", version, about = "Tail dependence experiments for linear models of exponential-tailed noise")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Root seed; required by stochastic subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (written atomically); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON parameter file overriding the subcommand defaults.
    #[arg(long, global = true, value_name = "JSON")]
    pub params: Option<PathBuf>,
    /// Restore the published experiment sizes.
    #[arg(long, global = true)]
    pub paper_scale: bool,
    /// Worker threads.
    #[arg(long, global = true, env = "EXDEP_THREADS")]
    pub threads: Option<usize>,
    /// Lattice size in nodes (a perfect square).
    #[arg(long, global = true)]
    pub mesh_nodes: Option<usize>,
    /// Number of simulated samples.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

impl Common {
    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::Usage("this subcommand is stochastic and needs --seed".into()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// chi of (Y1 + a12 Y2, Y1 + a22 Y2) over an a22 grid for symmetric GH noise.
    ChiVsA22,
    /// eta of integral approximations of a Levy-driven OU process.
    OuConvergence,
    /// eta of integral and FEM approximations of a Matern type G field.
    MaternEta,
    /// Simulate a type G field and estimate chi(q) for every site pair.
    SimulateChi,
    /// Regime, eta and chi of a coefficient matrix (CSV or JSON file).
    Eta(commands::eta::EtaArgs),
    /// Empirical chi(q) of X/n + eps for heavy-tailed X.
    Counterexample,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return error::usage("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let c = &cli.common;
    let bytes = match &cli.command {
        Command::ChiVsA22 => commands::chi_a22::run(c)?,
        Command::OuConvergence => commands::ou::run(c)?,
        Command::MaternEta => commands::matern::run(c)?,
        Command::SimulateChi => commands::simulate::run(c)?,
        Command::Eta(args) => commands::eta::run(c, args)?,
        Command::Counterexample => commands::counterexample::run(c)?,
    };
    output::emit(c.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("exdep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
