//! Experiment runner: binds datasets, prompting methods, backends and reports.

pub mod config;
pub mod report;
pub mod run;
pub mod validate;

use std::path::Path;

use thiserror::Error;

pub use config::RunConfig;
pub use report::cmd_report;
pub use run::{cmd_run, run_id, run_with_backend, RunOptions, RunSummary};
pub use validate::cmd_validate;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] spp_core::tasks::DatasetError),
    #[error(transparent)]
    Template(#[from] spp_core::strategies::TemplateError),
    #[error(transparent)]
    Backend(#[from] spp_core::backend::BackendError),
    #[error(transparent)]
    Report(#[from] spp_core::evaluation::ReportError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for anything rejected before the first backend call, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Dataset(_) | CliError::Template(_) => 2,
            _ => 1,
        }
    }
}

/// Writes through a temporary file in the same directory and renames it into place,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
