//! Command-line front end: configuration handling and the five subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use args::{Cli, Command};
use error::CliError;

/// Run a parsed command line, writing results to stdout or `--output`.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| error::config_err(format!("cannot start {jobs} workers: {e}")))?;
    }
    let (text, output, partial) = match &cli.command {
        Command::Modes(a) => (commands::cmd_modes(&a.load()?)?, &a.output, None),
        Command::Rates(a) => (commands::cmd_rates(&a.load()?)?, &a.output, None),
        Command::Compare(a) => (commands::cmd_compare(&a.load()?)?, &a.output, None),
        Command::Dynamics(a) => (commands::cmd_dynamics(&a.load()?)?, &a.point.output, None),
        Command::Sweep(a) => {
            let (text, failed, total) = commands::cmd_sweep(&a.load()?)?;
            (text, &a.point.output, (failed > 0).then_some((failed, total)))
        }
    };
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    match partial {
        Some((failed, total)) => Err(CliError::PartialFailure { failed, total }),
        None => Ok(()),
    }
}
