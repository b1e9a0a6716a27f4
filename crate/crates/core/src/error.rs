use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no embedding for document `{0}`")]
    MissingEmbedding(String),
    #[error("document `{0}` is already a member of the cluster")]
    DuplicateDocument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cluster pool is empty")]
    EmptyPool,
    #[error("document `{0}` has no gold cluster label")]
    MissingGoldLabel(String),
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("minority class has {found} samples, at least 2 are required")]
    TooFewMinority { found: usize },
    #[error("line search failed to find a descent step after {retries} retries")]
    LineSearchFailure { retries: usize },
    #[error("cross-validation needs at least {required} gold clusters, found {found}")]
    TooFewClusters { found: usize, required: usize },
    #[error("partitions cover different document sets")]
    IdSetMismatch,
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing field `{field}` at line {line}")]
    MissingField { line: usize, field: String },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("bad magic number")]
    BadMagic,
    #[error("file is truncated: {0}")]
    TruncatedFile(String),
    #[error("unsupported format version {found} (this build reads up to {supported})")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
