use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CliError {
    #[error("schema error in `{field}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Schema { line: Option<usize>, field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] hkreduce::Error),
}
