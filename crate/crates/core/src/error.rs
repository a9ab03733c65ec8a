use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid hardware config:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("no working element carries metric {0}")]
    EmptySelection(String),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid pattern schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("circuit has {n} qubits, simulator limit is {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("bitstring length {got} does not match {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },

    #[error("qubit order mismatch: samples {samples:?}, circuit {circuit:?}")]
    QubitOrderMismatch { samples: Vec<u32>, circuit: Vec<u32> },

    #[error("{0}")]
    Domain(String),

    #[error("mapping error: {0}")]
    Mapping(String),

    #[error("no embedding exists: {0}")]
    NoEmbedding(String),

    #[error("search budget of {0} nodes exhausted before an embedding was found")]
    BudgetExhausted(u64),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("unknown task {0}")]
    UnknownTask(String),

    #[error("illegal status transition {from} -> {to}")]
    IllegalTransition { from: String, to: String },

    #[error("task {id} is {status}: {message}")]
    TaskNotDone {
        id: String,
        status: String,
        message: String,
    },

    #[error("task {0} is locked by another writer")]
    Locked(String),

    #[error("archive error: {0}")]
    Archive(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
