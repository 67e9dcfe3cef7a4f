//! `saari` command-line front end.
//!
//! Exit codes: 0 success, 1 a checked invariant or proof verdict failed,
//! 2 bad usage or input, 3 internal error.

mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::load_config(cli.config.as_deref())?;
    let out = commands::out_dir(cli.out_dir.as_ref(), &file);
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &file, &out),
        Command::Contour(a) => commands::contour(a, &file, &out),
        Command::VerifyProof(a) => commands::verify_proof(a, &file, &out),
        Command::CentralConfigs(a) => commands::central_configs(a, &file),
        Command::QkCheck(a) => commands::qk_check(a, &file),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Breach(_) => "check failed",
                CliError::Usage(_) => "usage error",
                CliError::Internal(_) => "internal error",
            };
            eprintln!("saari: {kind}: {e}");
            e.exit_code()
        }
    }
}
