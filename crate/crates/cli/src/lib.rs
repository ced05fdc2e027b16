//! Command-line front end for `gratingprob`: turns a [`RunConfig`] into a
//! [`FigureDataset`] and writes it as CSV or JSON.
//!
//! Output is a pure function of the configuration and seed, so repeated runs
//! produce byte-identical files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dataset;
pub mod expr;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gratingprob::ModelError;
use thiserror::Error;

pub use config::{Command, RunConfig};
pub use dataset::{emit, DatasetError, FigureDataset, Format};

/// Exit status for bad arguments or violated preconditions.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when a computation fails to converge or yields non-finite data.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit status when the output cannot be written.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(ModelError::NoConvergence { .. }) => EXIT_NUMERICAL,
            CliError::Model(_) => EXIT_USAGE,
            CliError::Dataset(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

/// Computes the dataset for a configuration without writing it.
pub fn render(config: &RunConfig) -> Result<FigureDataset, CliError> {
    let ds = match &config.command {
        Command::Figure(a) => commands::figure(a)?,
        Command::Table(a) => commands::table(a)?,
        Command::Omega(a) => commands::omega(a)?,
        Command::Experiment(a) => commands::experiment(a, config.output.seed)?,
        Command::Sweep(a) => commands::sweep(a)?,
    };
    ds.validate()?;
    Ok(ds)
}

/// Renders, serializes and writes the output; returns the file written, if any.
pub fn run(config: &RunConfig) -> Result<Option<PathBuf>, CliError> {
    let bytes = emit(&render(config)?, config.output.format);
    match config.output.target() {
        Some(path) => {
            write_atomic(&path, &bytes)?;
            Ok(Some(path))
        }
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(&bytes).and_then(|_| out.flush()) {
                // a closed pipe (`| head`) is the reader's choice, not a failure
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                }),
                _ => Ok(None),
            }
        }
    }
}

/// Writes through a temporary file in the destination directory, then
/// renames it into place so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
