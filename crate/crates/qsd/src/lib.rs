//! Exact density-matrix simulator and variational optimizer for two-party
//! LOCC quantum state discrimination over a noisy classical channel, with
//! Helstrom and PPT upper bounds and a sweep harness.

pub mod ansatz;
pub mod bounds;
pub mod cli;
pub mod linalg;
pub mod optimize;
pub mod par;
pub mod protocol;
pub mod quantum;
pub mod sweep;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("invalid qubit permutation")]
    InvalidPermutation,
    #[error("state vector not normalized (norm² = {norm})")]
    NotNormalized { norm: f64 },
    #[error("matrix trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("matrix not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("channel has no Kraus operators")]
    EmptyChannel,
    #[error("Kraus operators do not satisfy the completeness relation")]
    IncompleteChannel,
    #[error("invalid projector set: {0}")]
    BadProjectorSet(&'static str),
    #[error("parameter {name} out of range: {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("control and target qubits invalid: control={control}, target={target}")]
    BadQubitIndex { control: usize, target: usize },
    #[error("grid of {size} points exceeds the {limit} cap")]
    GridTooLarge { size: u64, limit: u64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
