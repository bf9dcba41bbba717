use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use reservoir_cli::config::{load_ini, Method, ScenarioConfig};
use reservoir_cli::figures::{emit_figure, Figure};
use reservoir_cli::sweep::{parse_values, run_sweep};
use reservoir_cli::{run_scenario, Result};

#[derive(Parser)]
#[command(name = "reservoir", version, about = "Atom-reservoir dynamics and entanglement densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output] directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Run the scenario once per value of one key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot-ready data for one of the standard figures.
    Figures {
        #[arg(long, value_enum)]
        which: Figure,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, method } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            if let Some(out) = out {
                cfg.directory = out;
            }
            if let Some(m) = method {
                cfg.method = m;
            }
            let manifest = run_scenario(&cfg)?;
            println!(
                "wrote {} files to {} in {:.2} s",
                manifest.files.len(),
                cfg.directory.display(),
                manifest.duration_seconds
            );
        }
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => {
            let ini = load_ini(&config)?;
            let values = parse_values(&values)?;
            let out = match out {
                Some(o) => o,
                None => ScenarioConfig::from_ini(&ini)?.directory,
            };
            let points = run_sweep(&ini, &axis, &values, &out)?;
            println!("wrote {} sweep points to {}", points.len(), out.display());
        }
        Command::Figures { which, out } => {
            for path in emit_figure(which, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
