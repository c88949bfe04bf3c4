//! Batch front-end for the beam operator toolbox.
//!
//! Subcommands: `build-operators`, `check-ccr`, `expect`, `oracle`,
//! `modes-dump`. Machine-readable JSON goes to stdout, human progress to
//! stderr, tables and matrices to files under the output directory.
//!
//! Exit codes: 0 success, 2 tolerance failure, 3 configuration error.

mod commands;
mod config;

use clap::{error::ErrorKind, Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, unreadable inputs, unwritable outputs: exit 3.
    Config(String),
    /// A numerical check exceeded its tolerance: exit 2.
    Tolerance(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn tolerance(msg: impl Into<String>) -> Self {
        CliError::Tolerance(msg.into())
    }

    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(3),
            CliError::Tolerance(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Tolerance(m) => m,
        }
    }
}

impl From<beamop::Error> for CliError {
    fn from(err: beamop::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "beamop",
    about = "Mode-space momentum and angular-momentum operators for quasi-paraxial beams",
    version
)]
struct Cli {
    /// Run configuration JSON; built-in defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the truncation order from the config.
    #[arg(long, global = true, value_name = "N")]
    ncut: Option<usize>,

    /// Override the output directory from the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the operator family as sparse CSV plus a manifest.
    BuildOperators,
    /// Verify the commutation table and report each pair as JSON.
    CheckCcr,
    /// Evaluate moments, tilt angles, helicity and per-photon OAM of a state file.
    Expect {
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
    },
    /// Integrate field momentum densities and compare with operator expectations.
    Oracle {
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
        /// Escalate grid-coverage warnings to a configuration error.
        #[arg(long)]
        strict: bool,
        /// Also write the density map as CSV to this path.
        #[arg(long, value_name = "PATH")]
        density_csv: Option<PathBuf>,
    },
    /// Dump transverse mode profiles as CSV for plotting.
    ModesDump {
        /// Plane to sample [m].
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        /// Dump a single mode order n (with --m) instead of all.
        #[arg(long, requires = "m")]
        n: Option<usize>,
        /// Dump a single mode order m (with --n).
        #[arg(long, requires = "n")]
        m: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(ncut) = cli.ncut {
        config.ncut = ncut;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.display().to_string();
    }

    match cli.command {
        Command::BuildOperators => commands::build_operators(&config),
        Command::CheckCcr => commands::check_ccr(&config),
        Command::Expect { state } => commands::expect(&config, &state),
        Command::Oracle {
            state,
            strict,
            density_csv,
        } => commands::oracle(&config, &state, strict, density_csv.as_deref()),
        Command::ModesDump { z, n, m } => commands::modes_dump(&config, z, n.zip(m)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
