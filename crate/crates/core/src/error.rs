use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::statevector::MAX_QUBITS)]
    QubitCount(usize),

    #[error("combined register of {0} qubits exceeds capacity of {max}", max = crate::statevector::MAX_QUBITS)]
    CapacityExceeded(usize),

    #[error("label {label:?} does not describe a {n_qubits}-qubit basis state")]
    BadLabel { label: String, n_qubits: usize },

    #[error("invalid bit string {0:?}")]
    BadBits(String),

    #[error("amplitude vector of length {0} is not 2^n for a supported n")]
    BadLength(usize),

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("state not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("qubit {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("outcome {0} has zero probability")]
    ImpossibleOutcome(String),

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("fidelity parameter {0} outside [0, 1]")]
    FidelityRange(f64),

    #[error("dimension {0} is not a power of two >= 2")]
    BadDimension(u32),

    #[error("bit count must be positive")]
    ZeroBits,

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("distillation: {0}")]
    Distillation(String),

    #[error("golden expansion: {0}")]
    Golden(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Write { path: std::path::PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
