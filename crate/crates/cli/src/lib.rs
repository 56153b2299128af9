//! Command-line front end for `stiefel-core`: simulation and Gibbs fits of
//! the model-based SVD and the network eigenmodel, with CSV inputs and
//! outputs and a replayable run manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{replay, run};
pub use config::{Cli, Command, RunConfig};
pub use error::{CliError, Result};

/// Dispatches a parsed command line.
pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::SvdSim(a) => run(&RunConfig::SvdSim(a)),
        Command::SvdFit(a) => run(&RunConfig::SvdFit(a)),
        Command::EigenFit(a) => run(&RunConfig::EigenFit(a)),
        Command::Replay(a) => replay(&a.manifest, a.out_dir),
    }
}
