use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bihari::bounds::PsiArgumentMode;
use bihari::runner::{run_scenario, Command, Overrides, RunOutput};

/// Certified upper bounds for retarded integral inequalities, with
/// independent fixed-point verification.
#[derive(Parser)]
#[command(name = "bihari", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the certified bound; writes bound.csv and report.txt
    Bound(RunArgs),
    /// Solve the matching integral equality; writes solution.csv
    Solve(RunArgs),
    /// Bound, solve, and check dominance; exit 0 iff the bound dominates
    Verify(RunArgs),
    /// Repeat over the declared parameter range; writes sweep.csv
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML)
    scenario: PathBuf,

    /// Override the grid size (must be of the form 2^k + 1)
    #[arg(long, value_name = "N")]
    grid: Option<usize>,

    /// Override the solver tolerance
    #[arg(long, value_name = "X")]
    tol: Option<f64>,

    /// Argument handed to Psi in the composite bound
    #[arg(long, value_name = "MODE", value_parser = parse_mode)]
    mode: Option<PsiArgumentMode>,

    /// Directory for CSV and report output
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Skip the hypothesis validators (the report is watermarked UNCHECKED)
    #[arg(long)]
    unchecked: bool,
}

fn parse_mode(s: &str) -> Result<PsiArgumentMode, String> {
    PsiArgumentMode::from_token(s)
        .ok_or_else(|| format!("'{s}' is not a mode (expected 'as-printed' or 'conservative')"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Bound(a) => (Command::Bound, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let overrides = Overrides {
        grid_points: args.grid,
        tolerance: args.tol,
        mode: args.mode,
        unchecked: args.unchecked,
    };
    let RunOutput {
        status,
        messages,
        files,
    } = run_scenario(&args.scenario, command, &overrides, &args.out);
    for m in &messages {
        println!("{m}");
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    ExitCode::from(status as u8)
}
