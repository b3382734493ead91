//! File formats, report schema and the run pipeline behind the `gel`
//! command-line tool. The statistical machinery lives in `gel-core`; this
//! crate only moves bytes, resolves configuration and serializes results.

use std::path::Path;

use thiserror::Error;

pub mod config;
pub mod io;
pub mod npy;
pub mod report;
pub mod run;

pub use config::{DivergenceChoice, KernelChoice, RunConfig, TestCommand};
pub use report::Report;
pub use run::run;

/// Errors surfaced to the command line. All of them exit with code 2;
/// completed tests (including infinite-divergence outcomes) exit 0.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid NPY: {msg}")]
    Npy { path: String, msg: String },

    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] gel_core::Error),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}
