use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A malformed line in an input file. Line numbers are 1-based.
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("interpolation weights must be non-negative with lambda1 + lambda2 <= 1 (got {lambda1}, {lambda2})")]
    LambdaConstraint { lambda1: f64, lambda2: f64 },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("state `{0}` is not part of the model tagset")]
    UnknownTag(String),

    #[error("gold annotations reference statements missing from the corpus: {}", .0.join(", "))]
    DanglingStatements(Vec<String>),

    #[error("statement id mismatch: expected `{expected}`, found `{found}`")]
    StatementMismatch { expected: String, found: String },

    #[error("verb `{0}` is not tracked by the lexicon")]
    UntrackedVerb(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn parse(path: impl AsRef<Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
