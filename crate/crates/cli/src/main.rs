//! `bridgex`: bridge regression fits, marginal screening, diagnostics and
//! simulation benchmarks from the command line.
//!
//! Exit status: 0 on success, 1 on a usage error (no report written), 2 on a
//! data error, 3 when the solver did not converge (the report is still written).

mod args;
mod commands;
mod error;
mod input;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(status) => {
            if status == error::Status::NotConverged {
                eprintln!("warning: solver did not converge; the report holds the best iterate");
            }
            ExitCode::from(status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
