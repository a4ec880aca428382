use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pairanneal_cli::commands::{self, Format, Options, Outcome};
use pairanneal_cli::sweep::{Param, SweepSpec};
use pairanneal_cli::{CliError, Scenario};

#[derive(Parser)]
#[command(name = "pairanneal", version, about = "Ancilla-pair quantum annealing under a common Ohmic bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON; the built-in two-variable benchmark when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for tables, figures and cached sweep points
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,

    /// Override run.dt (ns)
    #[arg(long, global = true)]
    dt: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of H(t), and of the all-ones sector block for the ancilla driver
    Spectrum {
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// One open-system anneal from the ground state of H(0)
    Run,
    /// Ancilla vs conventional over a two-parameter grid
    Sweep {
        /// longitudinal (c x gz), angle (theta x g) or transversal (c x gx)
        #[arg(long, conflicts_with = "axes")]
        preset: Option<String>,
        /// Two of c, gz, gx, theta, g with default ranges, e.g. `c,gz`
        #[arg(long, value_delimiter = ',', num_args = 2)]
        axes: Option<Vec<Param>>,
    },
    /// Structural self-checks; JSON report
    Verify {
        /// Skip the integrator cross-checks
        #[arg(long)]
        quick: bool,
    },
    /// Probability discrepancy between dt and dt/2
    Convergence {
        /// Closed-system run instead of the master equation
        #[arg(long)]
        closed: bool,
        /// Pass threshold; 1e-7 closed, 1e-5 open
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let mut scenario = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::reference(),
    };
    if let Some(dt) = cli.dt {
        scenario.run.dt = dt;
    }
    let opts = Options { out: cli.out, parallel: cli.parallel, format: cli.format };
    match cli.command {
        Command::Spectrum { points } => commands::cmd_spectrum(&scenario, points, &opts),
        Command::Run => commands::cmd_run(&scenario, &opts),
        Command::Sweep { preset, axes } => {
            let spec = match (preset, axes, &scenario.sweep) {
                (Some(name), _, _) => SweepSpec::preset(&name)?,
                (None, Some(axes), _) => SweepSpec::new(axes[0], axes[1]),
                (None, None, Some(spec)) => spec.clone(),
                (None, None, None) => SweepSpec::preset("longitudinal")?,
            };
            commands::cmd_sweep(&scenario, &spec, &opts)
        }
        Command::Verify { quick } => commands::cmd_verify(&scenario, quick, &opts),
        Command::Convergence { closed, tol } => commands::cmd_convergence(&scenario, closed, tol, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
