use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("Bell measurement needs two distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot form a tensor product of zero parts")]
    EmptyTensor,

    #[error("state does not factor over the requested qubits")]
    NotAProductState,

    #[error("measurement outcome is not deterministic ({0} branches)")]
    NonDeterministic(usize),

    #[error("signal speed must be positive, got {0}")]
    NonPositiveSpeed(f64),

    #[error("invalid schedule parameters: {0}")]
    InvalidSchedule(String),

    #[error("unknown actor `{0}`")]
    UnknownActor(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("missing transcript field `{0}`")]
    MissingField(&'static str),

    #[error("expected {expected} announced labels, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
