//! Command-line front end of the `besselgap` engine.
//!
//! [`main_with`] parses the arguments, merges the `--config` file under the
//! flags, runs the subcommand and writes CSV or JSON. Exit statuses: 0 on
//! success, 1 for an unknown or missing command, 2 for invalid input, 3 for
//! a numerical failure (or a failed `selfcheck`).

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod selfcheck;

use args::{Cli, Command, Options};
use clap::error::ErrorKind;
use clap::Parser;
use error::{CliError, CliResult};
use std::ffi::OsString;
use std::io::Write;

/// Exit status of a `selfcheck` with failed checks.
pub const SELFCHECK_FAILED: i32 = 3;

fn execute(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> CliResult<i32> {
    let options = match &cli.config {
        Some(path) => cli.options.clone().over(Options::from_file(path)?),
        None => cli.options.clone(),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Input("--jobs must be at least 1".into()));
        }
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let table = commands::run(cli.command, &options)?;
    let config = serde_json::json!({ "command": cli.command, "options": options });
    table.write(options.format(), &config, out, err)?;
    if cli.command == Command::Selfcheck && !selfcheck::all_passed(&table) {
        return Ok(SELFCHECK_FAILED);
    }
    Ok(0)
}

/// Runs the program on `args` (including the program name) and returns the
/// exit status.
pub fn main_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if informational {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return match e.kind() {
                _ if informational => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 1,
                _ => 2,
            };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
