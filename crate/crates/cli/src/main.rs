//! `anderson`: batch driver for the 2D Anderson hamiltonian toolkit.
//! Thin shell over [`runner::run`]: parse, run, translate errors into
//! single-line JSON on stderr and a stable exit code.

mod commands;
mod error;
mod manifest;
mod plotdata;
mod runner;

use clap::error::ErrorKind;
use clap::Parser;
use error::emit_error_json;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match runner::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            // Help and version are requested output, not failures.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error_json("usage", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match runner::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error_json(e.kind(), &e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
