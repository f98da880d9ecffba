//! Command-line interface.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 2 for usage and input errors, 3 for numerical
//! failures.

mod args;
mod commands;
pub mod report;

use crate::error::{Error, Result};
use args::{Cli, Command, Format};
use clap::Parser;
use report::RunReport;
use std::ffi::OsString;
use std::time::Instant;

pub use commands::{casestudy_csv, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, echo) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn execute(cli: Cli, echo: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let g = &cli.global;
    let mut report = RunReport::new(echo, g.seed);
    match &cli.command {
        Command::Casestudy(a) => return emit(&commands::casestudy_csv(a)?, g.out.as_deref()),
        Command::Estimate(a) => commands::cmd_estimate(a, &mut report)?,
        Command::Entropy(a) => commands::cmd_entropy(a, &mut report)?,
        Command::Test(a) => commands::cmd_test(a, &mut report)?,
        Command::Gof(a) => commands::cmd_gof(a, &mut report)?,
        Command::Simulate(a) => commands::cmd_simulate(a, g.seed, &mut report)?,
        Command::Synth(a) => commands::cmd_synth(a, g.seed, &mut report)?,
        Command::Resample(a) => commands::cmd_resample(a, g.seed, &mut report)?,
    }
    if g.timing {
        report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    }
    let text = match g.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    emit(&text, g.out.as_deref())
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush().map_err(Error::from)
        }
    }
}
