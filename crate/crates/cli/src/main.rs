mod cli;
mod commands;

use std::process::ExitCode;

use bwmd_core::{Error, Execution};
use clap::Parser;

use cli::{Cli, Command};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Malformed { .. } | Error::Json(_) => EXIT_IO,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        _ => EXIT_CONFIG,
    }
}

fn execution(threads: Option<usize>) -> Result<Execution, Error> {
    match threads {
        Some(0) => Err(Error::InvalidArgument(
            "--threads must be at least 1".into(),
        )),
        Some(1) => Ok(Execution::Serial),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Serial),
        None => Ok(Execution::Parallel),
    }
}

/// `Ok(false)` means the command ran but reported failing checks.
fn run(cli: Cli) -> Result<bool, Error> {
    let exec = execution(cli.threads)?;
    match cli.command {
        Command::Embed(args) => commands::embed(&args, exec).map(|()| true),
        Command::Dist(args) => commands::dist(&args, exec).map(|()| true),
        Command::Cluster(args) => commands::cluster(&args, exec).map(|()| true),
        Command::Knn(args) => commands::knn(&args, exec).map(|()| true),
        Command::Experiment(args) => commands::experiment(&args, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
