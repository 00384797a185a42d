use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping of errors, used by the command line front-end to pick an
/// exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("duplicate triple ({0}, {1}, {2})")]
    DuplicateTriple(String, String, String),

    #[error("entity `{0}` declared with conflicting kinds")]
    ConflictingKind(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no embedding for {0}")]
    MissingEmbedding(String),

    #[error("could not draw a valid corrupted triple after {0} attempts")]
    ExhaustedCandidates(usize),

    #[error("non-finite loss at {0}")]
    NonFiniteLoss(String),

    #[error("surface is empty after trimming")]
    EmptySurface,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("gold entity is absent from the ranking")]
    GoldMissing,

    #[error("split `{0}` has no pairs")]
    EmptySplit(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{path}:{line}: bad split tag `{tag}` (expected train, dev or test)")]
    BadSplitTag {
        path: String,
        line: usize,
        tag: String,
    },

    #[error("checkpoint format version {found} (expected {expected})")]
    VersionMismatch { found: u8, expected: u8 },

    #[error("checkpoint is corrupt: {0}")]
    CorruptChecksum(String),

    #[error("invalid synthetic spec: {0}")]
    SpecInvalid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonFiniteLoss(_) | Error::ExhaustedCandidates(_) => ErrorClass::Numeric,
            Error::Config(_) | Error::SpecInvalid(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
