//! `solwave`: solitary-wave profiles, verification and evolution from the command line.

mod args;
mod evolve;
mod exit;
mod layers;
mod manifest;
mod selftest;
mod solve;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::exit::CliError;
use crate::layers::Layers;

/// Ground states, exact-solution checks and time evolution for a nonlocal derivative
/// nonlinear Schrödinger equation on a periodic box.
///
/// Values are taken from flags first, then from the `--config` file, then from defaults.
/// Exit codes: 0 success, 2 invalid input, 3 regime without solutions, 4 no convergence or no localized profile,
/// 5 verification failed, 6 every sweep point failed.
#[derive(Parser, Debug)]
#[command(name = "solwave", version)]
struct Cli {
    /// Flat `key = value` file with parameters and grid settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "SOLWAVE_OUT", default_value = "solwave-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a ground-state profile.
    Solve(solve::SolveArgs),
    /// Check the residual and integral identities of a profile.
    ///
    /// For `--exact` use a large grid; `--n 32768` with the default `--L` (128 pi) is recommended.
    Verify(verify::VerifyArgs),
    /// Evolve a field or a benchmark and record conserved quantities.
    Evolve(evolve::EvolveArgs),
    /// Solve over a cartesian grid of parameters.
    Sweep(sweep::SweepArgs),
    /// Run quick end-to-end checks.
    Selftest,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (file, hash) = Layers::from_file(cli.config.as_deref())?;
    let mut layers = Layers::default();
    if let Command::Evolve(args) = &cli.command {
        if let Some(b) = args.benchmark {
            for (k, v) in evolve::benchmark_defaults(b) {
                layers.set(k, v);
            }
        }
    }
    layers.overlay(&file);
    match &cli.command {
        Command::Solve(args) => {
            args.apply(&mut layers);
            if args.force {
                layers.set("force", true);
            }
            solve::run(&layers, &cli.out, hash, false).map(|_| ())
        }
        Command::Verify(args) => {
            args.params.apply(&mut layers);
            args.grid.apply(&mut layers);
            verify::run(args, &layers, &cli.out, hash)
        }
        Command::Evolve(args) => {
            args.apply(&mut layers);
            evolve::run(args, &layers, &cli.out, hash)
        }
        Command::Sweep(args) => {
            args.solve.apply(&mut layers);
            if args.solve.force {
                layers.set("force", true);
            }
            sweep::run(args, &layers, &cli.out, hash)
        }
        Command::Selftest => selftest::run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code.clamp(1, 255) as u8)
        }
    }
}
