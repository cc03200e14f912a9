use std::io;
use std::path::PathBuf;

use curriculum::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("failed to parse config {path}: {source}")]
    ConfigSyntax {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("run with seed {seed} failed: {source}")]
    RunFailed {
        seed: u64,
        #[source]
        source: CoreError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
