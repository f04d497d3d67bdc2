//! Command-line front end for `monopole-core`: spectra, algebraic solutions,
//! finite-difference oracles, cross-method comparisons and verification
//! suites, emitted as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Parser, Subcommand};

use commands::{Suite, VerifyOptions};
use config::CommonArgs;
pub use error::CliError;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "monopole-spectra", version)]
#[command(
    about = "Bound-state spectra of the Kepler-monopole system in generalized Taub-NUT space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form energies of all parabolic levels up to --nmax
    Spectrum(CommonArgs),

    /// Set-1 and Set-2 solutions of the structure-function constraints
    Algebraic(CommonArgs),

    /// Run verification suites; exits 1 when any check fails
    Verify {
        #[command(flatten)]
        common: CommonArgs,

        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,

        /// Random draws for the phi and spectrum suites.
        #[arg(long, default_value_t = 50)]
        trials: usize,

        /// Shift u in the unirrep suite (fault injection).
        #[arg(long, allow_hyphen_values = true)]
        perturb_u: Option<f64>,
    },

    /// Finite-difference eigenvalues over nested grids
    Oracle(CommonArgs),

    /// Closed-form, bisection, algebraic and finite-difference energies side by side
    Compare(CommonArgs),

    /// List the named parameter sets
    Presets(CommonArgs),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn execute(command: &Command) -> Result<(Report, Option<config::RunConfig>), CliError> {
    Ok(match command {
        Command::Spectrum(a) => {
            let cfg = config::resolve(a)?;
            (commands::spectrum(&cfg)?, Some(cfg))
        }
        Command::Algebraic(a) => {
            let cfg = config::resolve(a)?;
            (commands::algebraic(&cfg)?, Some(cfg))
        }
        Command::Verify {
            common,
            suite,
            trials,
            perturb_u,
        } => {
            let cfg = config::resolve(common)?;
            let opts = VerifyOptions {
                suite: *suite,
                trials: *trials,
                perturb_u: *perturb_u,
            };
            (commands::verify(&cfg, &opts)?, Some(cfg))
        }
        Command::Oracle(a) => {
            let cfg = config::resolve(a)?;
            (commands::oracle(&cfg)?, Some(cfg))
        }
        Command::Compare(a) => {
            let cfg = config::resolve(a)?;
            (commands::compare(&cfg)?, Some(cfg))
        }
        Command::Presets(a) => (commands::presets(), Some(config::resolve(a)?)),
    })
}

fn emit(report: &Report, cfg: &config::RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut w =
                BufWriter::new(File::create(path).map_err(|e| {
                    CliError::Usage(format!("cannot create {}: {e}", path.display()))
                })?);
            report.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(cfg.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = execute(&cli.command).and_then(|(report, cfg)| {
        let cfg = cfg.expect("every command resolves a config");
        emit(&report, &cfg)?;
        Ok(report.all_passed())
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("monopole-spectra: {e}");
            e.exit_code()
        }
    }
}
