use thiserror::Error;

/// Errors produced by the simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tensor product of an empty factor list")]
    EmptyTensor,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("register of {0} qubits exceeds the 8-qubit limit")]
    RegisterTooLarge(usize),
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("vector ({x}, {y}, {z}) is not a unit vector (norm {norm})")]
    NotUnitVector { x: f64, y: f64, z: f64, norm: f64 },
    #[error("axes are not orthogonal (dot product {0})")]
    NotOrthogonal(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("basis is not orthonormal (deviation {0})")]
    NotOrthonormal(f64),
    #[error("impossible branch: outcome probability {0:e}")]
    ImpossibleBranch(f64),
    #[error("outcome index {0} is not 0 or 1")]
    InvalidOutcome(usize),
    #[error("annihilated branch: practical branch state has norm {0:e}")]
    AnnihilatedBranch(f64),
    #[error("detector pair has zero coincidence probability")]
    ZeroProbabilityPair,
    #[error("unknown preset `{0}` (expected cnot, cz, cy or ch)")]
    UnknownPreset(String),
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
