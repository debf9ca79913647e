use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use extremal_qudit::Command;

/// Extremal density matrices of two-qubit Hamiltonians.
#[derive(Debug, Parser)]
#[command(name = "extremal-qudit", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the multistart solver and the verification draws.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match extremal_qudit::run(args.command, &args.config, args.out.as_deref(), args.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("extremal-qudit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
