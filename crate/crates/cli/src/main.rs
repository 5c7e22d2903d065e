//! `twoway-helper`: command-line front end for the region toolkit.
//!
//! Exit codes: 0 success, 1 negative or infeasible result, 2 input error.

mod commands;
mod model_file;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HELPER_RD_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable files, parse errors, invalid arguments.
    Input(String),
    /// Well-formed request whose answer is negative or infeasible.
    Negative(String),
}

impl CliError {
    pub fn input(e: twoway_helper::Error) -> Self {
        CliError::Input(e.to_string())
    }

    /// Sort a library error into input vs. negative-result failures.
    pub fn from_core(e: twoway_helper::Error) -> Self {
        use twoway_helper::Error as E;
        match e {
            E::Infeasible { .. } | E::NoFeasibleScheme | E::OpenProblemRegime { .. } | E::ChainViolated { .. } => {
                CliError::Negative(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer (got `{raw}`)")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure {n} worker threads: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli));
    match result {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
