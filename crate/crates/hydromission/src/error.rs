use std::path::PathBuf;

use hydromission_core::env::TerrainError;
use hydromission_core::mission::MissionError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: invalid config: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("map file {} not found", path.display())]
    MissingMap { path: PathBuf },
    #[error("map {}: {message}", path.display())]
    Map { path: PathBuf, message: String },
    #[error("terrain: {0}")]
    Terrain(#[from] TerrainError),
    #[error("graph: {0}")]
    Graph(#[from] MissionError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("run {run} (seed {seed}) failed: {message}")]
    RunFailed { run: usize, seed: u64, message: String },
    #[error("unknown plot kind `{0}`; expected one of: convergence, path3d, timebudget, cputime")]
    UnknownKind(String),
    #[error("{0}")]
    Plot(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
