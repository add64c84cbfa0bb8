//! `swg`: convergence tables, maximum-principle reports and scheme
//! comparisons from the command line.
//!
//! Exit codes: 0 on success, 1 when a solve or a check fails, 2 on usage
//! errors. `SWG_THREADS` sets the worker count (default 1).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

const THREADS_VAR: &str = "SWG_THREADS";

fn init_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{THREADS_VAR} must be a positive integer, got '{v}'"
                ))
            })?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failure(format!("cannot start thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    init_threads()?;
    match &cli.command {
        Command::Run(a) => commands::run(a).map(|_| true),
        Command::Fd(a) => commands::fd(a).map(|_| true),
        Command::Dmp(a) => commands::dmp(a),
        Command::Equiv(a) => commands::equiv(a),
        Command::ListProblems => commands::list_problems().map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("swg: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("swg: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
