//! Batch front end: reads a job config, runs construction and
//! certification for every requested case, and writes a JSON report.

pub mod cache;
pub mod config;
pub mod explain;
pub mod pipeline;
pub mod report;

pub use config::JobConfig;
pub use pipeline::{run, RunOptions};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{0}")]
    Input(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) | CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

/// Exit status for a finished run: FAIL verdicts are results, but a run
/// that hit a resource cap is reported as aborted.
pub fn run_exit_code(report: &Report) -> u8 {
    if report.any_capped() {
        3
    } else {
        0
    }
}

/// Writes `text` next to `path` and renames it into place.
pub fn write_atomic(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
