//! Command-line front end and file formats for `evanescent-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

pub use self::config::{parse_config, Command, RunConfig, Runtime};
pub use self::error::{CliError, Result};

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (config, runtime) = match parse_config(argv) {
        Ok(Ok(parsed)) => parsed,
        Ok(Err(clap_err)) => {
            let code = if clap_err.use_stderr() { 2 } else { 0 };
            let _ = clap_err.print();
            return code;
        }
        Err(err) => {
            eprintln!("error: {err}");
            return err.exit_code();
        }
    };
    match run_config(&config, &runtime) {
        Ok(_) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Executes a parsed run and writes its outputs. Returns the summary path.
pub fn run_config(config: &RunConfig, runtime: &Runtime) -> Result<PathBuf> {
    let started = Instant::now();
    if !runtime.quiet {
        eprintln!("{}: running", config.command.name());
    }
    let report = commands::execute(config, runtime)?;
    let summary = output::write_report(config, &report, &runtime.out_dir)?;
    if !runtime.quiet {
        eprintln!(
            "{}: wrote {} in {:.3} s",
            config.command.name(),
            summary.display(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(summary)
}
