//! Command-line front end. Every subcommand writes `report.json` to the
//! output directory and prints one line per check.
//!
//! Exit codes: 0 when every check passes, 2 on a mismatch, 3 when a solver
//! does not converge, 4 for a bad configuration, 1 for anything else.

pub mod commands;
pub mod config;
pub mod lab;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::calapso::CalapsoError;
use crate::systems::SystemId;
use config::{FieldError, LabConfig};
use lab::LabError;
use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "conformal-eds", version, about = "Second-order conformal deformation: symbolic checks and a lab for isothermic surfaces")]
pub struct Cli {
    /// Directory for report.json and any data files [default: the config's
    /// "outdir", else the current directory]
    #[arg(long, global = true)]
    pub outdir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure equations, symmetry identities, semibasic forms and the
    /// quadratic equations of the deformation system
    Verify {
        /// Negate one Maurer–Cartan entry first, given as "ROW,COL"
        #[arg(long, hide = true, value_parser = parse_entry)]
        mutate_entry: Option<(usize, usize)>,
    },
    /// Cartan characters and the involution test
    Involution {
        #[arg(long, default_value = "I2")]
        system: SystemId,
        /// Seed for the sampled ranks
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Polar ranks on and off the candidate singular locus
    Singular {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Solve for a field, build surfaces for every lambda and export them
    ///
    /// Config keys (all optional): grid {nx 64, ny 64, lx 1, ly 1};
    /// seed {type exact|constant_psi|goursat, ...}, default exact with
    /// profile k1 = x and c = 1; lambdas [0, 1]; tolerances {goursat {tol,
    /// max_iter}, drift 1e-8, surface 1e-9, deformation 1e-8}; frame
    /// {substeps 4, reproject_every 16}; contact {orders [2, 3],
    /// points_per_axis 4, accuracy 2}; base_frame_seed; outdir.
    Calapso {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// As calapso, plus Maurer–Cartan difference tables and jet contact
    Deform {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_entry(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected ROW,COL")?;
    let parse = |t: &str| t.trim().parse::<usize>().ok().filter(|&v| v < 6).ok_or(format!("{t:?} is not an index 0..5"));
    Ok((parse(a)?, parse(b)?))
}

fn lab_exit(e: &LabError) -> i32 {
    match e {
        LabError::Field(FieldError::Config(_)) => EXIT_CONFIG,
        LabError::Field(FieldError::Solver(c)) | LabError::Numeric(c) => match c {
            CalapsoError::NonConvergence { .. } | CalapsoError::Frame(_) => EXIT_NON_CONVERGENCE,
            CalapsoError::InconsistentCorner { .. } | CalapsoError::Shape(_) => EXIT_CONFIG,
            CalapsoError::ChartSingular { .. } => EXIT_FAILURE,
        },
        LabError::Symbolic(_) | LabError::Io { .. } => EXIT_FAILURE,
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<LabConfig, config::ConfigError> {
    match path {
        Some(p) => LabConfig::load(p),
        None => Ok(LabConfig::default()),
    }
}

fn finish(report: Report, outdir: &std::path::Path) -> i32 {
    print!("{}", report.summary());
    if let Err(e) = report.write(outdir) {
        eprintln!("error: writing report to {}: {e}", outdir.display());
        return EXIT_FAILURE;
    }
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_MISMATCH
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let default_dir = PathBuf::from(".");
    let symbolic = |r: Result<Report, crate::pfaffian::PfaffError>, dir: &PathBuf| match r {
        Ok(r) => finish(r, dir),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    };
    match &cli.command {
        Command::Verify { mutate_entry } => {
            symbolic(commands::cmd_verify(*mutate_entry), cli.outdir.as_ref().unwrap_or(&default_dir))
        }
        Command::Involution { system, seed } => {
            symbolic(commands::cmd_involution(*system, *seed), cli.outdir.as_ref().unwrap_or(&default_dir))
        }
        Command::Singular { samples, seed } => {
            symbolic(commands::cmd_singular(*samples, *seed), cli.outdir.as_ref().unwrap_or(&default_dir))
        }
        Command::Calapso { config } | Command::Deform { config } => {
            let cfg = match load_config(config.as_ref()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let dir = cli.outdir.clone().or_else(|| cfg.outdir.clone()).unwrap_or(default_dir);
            let result = if matches!(cli.command, Command::Calapso { .. }) {
                lab::cmd_calapso(&cfg, &dir)
            } else {
                lab::cmd_deform(&cfg, &dir)
            };
            match result {
                Ok(r) => finish(r, &dir),
                Err(e) => {
                    eprintln!("error: {e}");
                    lab_exit(&e)
                }
            }
        }
    }
}

/// Parses `args` and runs; usage errors exit 4, `--help` and `--version` 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_parse() {
        assert_eq!(parse_entry("1,3"), Ok((1, 3)));
        assert!(parse_entry("1;3").is_err());
        assert!(parse_entry("6,0").is_err());
    }

    #[test]
    fn usage_errors_exit_with_config_code() {
        assert_eq!(main_with_args(["conformal-eds", "bogus"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["conformal-eds", "involution", "--system", "I9"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["conformal-eds", "--help"]), EXIT_PASS);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
