//! CLI front end for `discrep-core`: single solves, delta-sweep convergence
//! experiments with CSV output, and gallery diagnostics.

pub mod args;
pub mod commands;
pub mod error;
pub mod fmt;
pub mod problem;
pub mod sweep;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Gallery(a) => commands::cmd_gallery(a),
    }
}
