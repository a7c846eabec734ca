use std::io;
use std::process::ExitCode;

use clap::Parser;
use stokes_mle_cli::cli::Cli;
use stokes_mle_cli::commands;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, &mut io::stderr()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
