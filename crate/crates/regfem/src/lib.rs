//! Command line, file formats and wall-clock execution for the `regfem-core`
//! convergence harness.

pub mod cli;
pub mod config_file;
pub mod exec;
pub mod meshio;
pub mod output;

use std::path::PathBuf;

pub use regfem_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] regfem_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{file}:{line}: {message}")]
    ConfigSyntax { file: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Args(#[from] clap::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
