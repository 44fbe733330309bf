use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use exdyn_cli::{parse_config_with, run, CliError, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Trajectory,
    VarianceCurve,
    Snapshot,
    Properties,
    Ar1Table,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Trajectory => Subcommand::Trajectory,
            Command::VarianceCurve => Subcommand::VarianceCurve,
            Command::Snapshot => Subcommand::Snapshot,
            Command::Properties => Subcommand::Properties,
            Command::Ar1Table => Subcommand::Ar1Table,
        }
    }
}

/// Simulate exemplar dynamics and write the results as CSV.
#[derive(Debug, Parser)]
#[command(name = "exdyn", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `output` key.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main_inner(args: Args) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::ReadConfig {
        path: args.config.clone(),
        source,
    })?;
    let mut overrides = Vec::new();
    if let Some(seed) = args.seed {
        overrides.push(("seed", seed.to_string()));
    }
    if let Some(out) = &args.out {
        overrides.push(("output", out.display().to_string()));
    }
    let spec = parse_config_with(&text, &overrides)?;
    run(args.command.into(), &spec)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(args) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("exdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
