use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sqzopto::model::Direction;
use sqzopto_cli::commands::{self, exit};
use sqzopto_cli::output::emit;
use sqzopto_cli::{resolve, CliError, Overrides, Resolved, RunConfig};

#[derive(Parser)]
#[command(
    name = "sqzopto",
    version,
    about = "Steady-state entanglement and steering in a squeezed WGM optomechanical system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Start from a figure preset (see `preset-list`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Leave out the timestamp comment line.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective quantities for both drive directions.
    Derive {
        #[command(flatten)]
        src: Source,
        /// Emit the enhancement factor over an (r_d, theta_d) grid as CSV instead.
        #[arg(long)]
        pi_grid: bool,
    },
    /// Solve one steady state and print all measures as a one-row CSV.
    Steady {
        #[command(flatten)]
        src: Source,
        /// Drive direction; defaults to the configured one.
        #[arg(long)]
        direction: Option<Direction>,
        /// Write the 6x6 covariance matrix here.
        #[arg(long, value_name = "PATH")]
        dump_cm: Option<PathBuf>,
        /// Write the drift matrix and drive vector (A.txt, b.txt) into this directory.
        #[arg(long, value_name = "DIR")]
        dump_drift: Option<PathBuf>,
    },
    /// Run a parameter sweep and write a CSV table.
    Sweep {
        #[command(flatten)]
        src: Source,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },
    /// List the built-in figure presets.
    PresetList,
}

fn load(src: &Source, workers: Option<usize>) -> Result<Resolved, CliError> {
    let ov = Overrides {
        preset: src.preset.clone(),
        out: src.out.clone(),
        workers,
        no_timestamp: src.no_timestamp,
    };
    match &src.config {
        Some(path) => {
            let (cfg, text) = RunConfig::load(path)?;
            Ok(resolve(Some((&cfg, &text)), &ov)?)
        }
        None => Ok(resolve(None, &ov)?),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Derive { src, pi_grid } => {
            let r = load(&src, None)?;
            if pi_grid {
                emit(r.out.as_deref(), &commands::pi_grid(&r)?)?;
            } else {
                emit(r.out.as_deref(), commands::derive(&r)?.as_bytes())?;
            }
        }
        Command::Steady {
            src,
            direction,
            dump_cm,
            dump_drift,
        } => {
            let r = load(&src, None)?;
            let dir = direction.unwrap_or(r.params.direction);
            let out = commands::steady(&r, dir, dump_drift.as_deref())?;
            if let (Some(path), Some(cm)) = (&dump_cm, &out.cm) {
                commands::write_cm(path, cm)?;
            }
            emit(r.out.as_deref(), &out.csv)?;
        }
        Command::Sweep { src, workers } => {
            let r = load(&src, workers)?;
            let t0 = Instant::now();
            let out = commands::sweep(&r)?;
            emit(r.out.as_deref(), &out.csv)?;
            let dest = r.out.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
            eprintln!(
                "{} in {:.2} s -> {dest}",
                commands::summarize(&out.rows),
                t0.elapsed().as_secs_f64()
            );
        }
        Command::PresetList => print!("{}", commands::preset_list()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::CONFIG as u8
            } else {
                exit::OK as u8
            });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
