//! Protocol-file driven runs of the `sta-core` designs: trap design tables,
//! propagation trajectories, Raman feasibility reports and side-by-side
//! method comparisons.

pub mod commands;
mod error;
mod output;
pub mod protocol_file;

pub use error::{CliError, Result};
pub use protocol_file::{Method, ProtocolFile, Schedule};

/// Worker count from `STA_THREADS`; `None` leaves the rayon default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("STA_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!("STA_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}
