use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infcast_cli::pipeline::{load_and_validate, run, Overrides};

/// Inflation forecasting study pipeline.
///
/// Log verbosity is read from INFCAST_LOG (error, warn, info, debug).
#[derive(Parser)]
#[command(name = "infcast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OverrideArgs {
    /// Replace the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Replace the configured forecast horizon.
    #[arg(long)]
    horizon: Option<usize>,
    /// Replace the configured split date (YYYYQn).
    #[arg(long)]
    split: Option<String>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            output_dir: a.output_dir,
            horizon: a.horizon,
            split: a.split,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all reports.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check a config without running anything.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Write the synthetic example dataset and config into a directory.
    Fixture { dir: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INFCAST_LOG", "warn")).init();
    match Cli::parse().command {
        Command::Run { config, overrides } => match run(&config, &overrides.into()) {
            Ok(summary) => {
                println!("wrote {} files to {}", summary.artifacts.len(), summary.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.kind.exit_code())
            }
        },
        Command::Validate { config, overrides } => match load_and_validate(&config, &overrides.into()) {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(problems) => {
                for p in &problems {
                    eprintln!("{p}");
                }
                ExitCode::from(2)
            }
        },
        Command::Fixture { dir } => match infcast_cli::fixture::write_fixture(&dir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
        },
    }
}
