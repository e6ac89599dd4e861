//! Command-line harness for the moving-conductor solvers.
//!
//! Subcommands: `solve` (single run to CSV/VTK), `convergence` (refinement
//! ladder), `stability` (Peclet sweep of the discrete poles), `compare`
//! (two formulations side by side with oscillation metrics).

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod runs;

#[derive(Parser)]
#[command(name = "mcfem", version, about = "Finite-element solvers for linear moving-conductor problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single solve and write field outputs.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the config's formulation: galerkin | wr | supg.
        #[arg(long)]
        formulation: Option<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Run a refinement ladder and write the convergence table.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        formulation: Option<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Sweep the discrete poles over Peclet numbers.
    Stability {
        /// Optional config carrying `pe_list` / `formulation`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// galerkin | wr
        #[arg(long)]
        formulation: Option<String>,
        /// Single Peclet value (repeatable via comma list).
        #[arg(long)]
        pe: Option<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Solve one problem with two formulations and report the contrast.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, out, formulation, quiet } => {
            runs::cmd_solve(&config, &out, formulation.as_deref(), quiet)
        }
        Command::Convergence { config, out, formulation, quiet } => {
            runs::cmd_convergence(&config, &out, formulation.as_deref(), quiet)
        }
        Command::Stability { config, out, formulation, pe, quiet } => {
            runs::cmd_stability(config.as_deref(), &out, formulation.as_deref(), pe.as_deref(), quiet)
        }
        Command::Compare { config, out, quiet } => runs::cmd_compare(&config, &out, quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runs::exit_code(&e))
        }
    }
}
