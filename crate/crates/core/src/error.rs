use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_q}-qubit register")]
    QubitOutOfRange { index: usize, n_q: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not tagged {expected}")]
    WrongKind { expected: &'static str },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid duration {0}: must be positive")]
    InvalidDuration(f64),

    #[error("qubits k and l must differ (both {0})")]
    SamePair(usize),

    #[error("qubits {0} and {1} are uncoupled")]
    UncoupledPair(usize, usize),

    #[error("block list is empty")]
    EmptyBlocks,

    #[error("piecewise Hamiltonian has no segments")]
    EmptySegments,

    #[error("no real root of the calibration condition in [0, {upper:e}]")]
    NoCalibrationRoot { upper: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("fit needs at least 3 points with positive fidelity, got {0}")]
    InsufficientFitData(usize),

    #[error("register of {n_q} qubits exceeds the dense simulation limit of {limit}")]
    ResourceLimit { n_q: usize, limit: usize },

    #[error("schedule parse error on line {line}: {message}")]
    ScheduleParse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
