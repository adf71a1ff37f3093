//! Command-line plumbing: configuration, file formats, discretization and
//! the `select` / `bench` runners. The binary in `src/bin/itfs.rs` is a thin
//! shell over this module.

pub mod binning;
pub mod config;
pub mod io;
pub mod run;
pub mod synth;

use thiserror::Error;

pub use config::{BenchConfig, Binning, Format, RunConfig};
pub use run::{run_bench, run_select, BenchRow, SelectRecord};

/// Errors surfaced by the CLI, each mapped to a distinct exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("data validation error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<crate::Error> for CliError {
    fn from(err: crate::Error) -> Self {
        use crate::Error as E;
        match err {
            E::UnknownCriterion(_)
            | E::FixedParameter { .. }
            | E::InvalidParameter(_)
            | E::InvalidPartitionCount
            | E::Pool(_) => CliError::Config(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}
