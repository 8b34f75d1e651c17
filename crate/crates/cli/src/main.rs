//! `lctcap`: batch front end for transforms, capacity tables, optimizer
//! runs, channel simulations and sampling demos.

mod commands;
mod schema;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{CliError, CliResult, Format, Output};

#[derive(Parser)]
#[command(name = "lctcap", version, about = "LCT transforms and generalized AWGN capacity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of a simulation config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Apply an LCT to a signal CSV.
    Transform,
    /// Sweep a capacity formula over one parameter.
    Capacity,
    /// Maximize a capacity over its parameters.
    Optimize,
    /// Monte Carlo run of the LCT-modified AWGN channel.
    Simulate,
    /// Reconstruction error against sampling rate.
    SampleDemo,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Optimize | Command::Simulate => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn load_config(path: Option<&Path>) -> CliResult<Value> {
    let path = path.ok_or_else(|| CliError::config("--config: required"))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: invalid JSON: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> CliResult<Output> {
    let value = load_config(cli.config.as_deref())?;
    let format = cli.format.unwrap_or(cli.command.default_format());
    let base = cli.config.as_deref().and_then(Path::parent).unwrap_or(Path::new("."));
    let output = match cli.command {
        Command::Transform => commands::transform(value, base, format)?,
        Command::Capacity => commands::capacity(value, format)?,
        Command::Optimize => commands::optimize(value, format)?,
        Command::Simulate => commands::simulate(value, cli.seed, format)?,
        Command::SampleDemo => commands::sample_demo(value, format)?,
    };
    match &cli.out {
        Some(path) => {
            write_file(path, &output.main)?;
            if let Some(trials) = &output.trials {
                write_file(&path.with_extension("trials.csv"), trials)?;
            }
        }
        None => {
            std::io::stdout()
                .write_all(output.main.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            if !cli.quiet {
                eprintln!("{}", output.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Config(problems) => {
                    eprintln!("error: invalid config");
                    for p in problems {
                        eprintln!("  {p}");
                    }
                }
                CliError::Numerical(msg) => eprintln!("error: numerical precondition failed: {msg}"),
                CliError::Io(msg) => eprintln!("error: i/o: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
