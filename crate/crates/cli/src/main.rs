mod cli;
mod commands;
mod error;
mod io;
mod manifest;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::EXIT_USAGE;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate::run(&a),
        Command::Select(a) => commands::select::run(&a),
        Command::Simulate(a) => commands::simulate::run(&a),
        Command::Report(a) => commands::report::run(&a),
        Command::Riskcurves(a) => commands::riskcurves::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
