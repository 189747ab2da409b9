mod args;
mod commands;

use std::io;
use std::process::ExitCode;

use anyhow::Error;
use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};

/// Bad flag combinations detected after clap parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<io::Error>() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<partsort_core::Error>() {
            return if e.is_io() { EXIT_IO } else { EXIT_DATA };
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let result = match &cli.command {
        Command::Gen(args) => commands::gen(&cli, args),
        Command::Stats(args) => commands::stats(&cli, args),
        Command::Simulate(args) => commands::simulate(&cli, args),
        Command::Report(args) => commands::report(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
