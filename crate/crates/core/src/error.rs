use alloc::string::String;

/// Errors raised by the simulation and learning core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid rotation matrix: orthogonality/determinant deviation {deviation:e}")]
    InvalidRotation { deviation: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("simulation diverged: non-finite {component}")]
    SimulationDiverged { component: String },
    #[error("training diverged: non-finite {what}")]
    TrainingDiverged { what: String },
    #[error("episode already finished; call reset first")]
    EpisodeDone,
    #[error("empty series")]
    EmptySeries,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
