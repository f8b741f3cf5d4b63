use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Training,
    Evaluation,
    Shortfall,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Training => 3,
            ErrorKind::Evaluation => 4,
            ErrorKind::Shortfall => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown {kind} `{key}`")]
    Lookup { kind: &'static str, key: String },

    #[error("missing {kind}: {}", keys.join(", "))]
    Missing { kind: &'static str, keys: Vec<String> },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error("negative sampling failed: {0}")]
    Sampling(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("sampler shortfall: requested {requested} pairs, retained {retained} (short by {})", requested - retained)]
    Shortfall { requested: usize, retained: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Lookup { .. }
            | Error::Missing { .. }
            | Error::InvalidData(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorKind::Data,
            Error::Diverged { .. } | Error::Sampling(_) | Error::Shape(_) => ErrorKind::Training,
            Error::Evaluation(_) => ErrorKind::Evaluation,
            Error::Shortfall { .. } => ErrorKind::Shortfall,
        }
    }
}
