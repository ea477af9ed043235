//! `sobolev`: tables, moments and identity verification from the command line.
//!
//! Exit status: 0 on success (for `verify`, every check passed), 1 when a check
//! fails or a computation breaks down, 2 on configuration errors.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{resolve, suites, Cli, Command, ConfigError, Format};

fn config_failure(e: &ConfigError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn runtime_failure(e: &sobolev_core::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if matches!(e, sobolev_core::Error::Config(_)) { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Table { opts, .. } | Command::Moments { opts } | Command::Verify { opts, .. }) = &cli.command;
    let run = match resolve(opts) {
        Ok(run) => run,
        Err(e) => return config_failure(&e),
    };
    let format = run.format;
    match &cli.command {
        Command::Table { kind, .. } => match commands::table(*kind, &run) {
            Ok(t) => println!("{}", if format == Format::Json { output::table_json(&t) } else { output::table_csv(&t) }),
            Err(e) => return runtime_failure(&e),
        },
        Command::Moments { .. } => match commands::moments(&run) {
            Ok(t) => println!("{}", if format == Format::Json { output::table_json(&t) } else { output::table_csv(&t) }),
            Err(e) => return runtime_failure(&e),
        },
        Command::Verify { suite, .. } => {
            let chosen = match suites(suite) {
                Ok(s) => s,
                Err(e) => return config_failure(&e),
            };
            let v = match commands::verify(&chosen, suite != "all", &run) {
                Ok(v) => v,
                Err(e) => return config_failure(&e),
            };
            let text = if format == Format::Json { output::verification_json(&v) } else { output::verification_csv(&v) };
            println!("{text}");
            if !v.passed {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
