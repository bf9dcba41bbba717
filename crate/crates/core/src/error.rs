use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    UnstableStep { dt: f64, limit: f64 },

    #[error("state is not normalized: |norm - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("state has {found} mode amplitudes but the grid has {expected} modes")]
    GridMismatch { expected: usize, found: usize },

    #[error("subsystem indices must differ")]
    SameSubsystem,

    #[error("subsystem index {index} out of range for {modes} modes")]
    SubsystemOutOfRange { index: usize, modes: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("grid spacing {spacing} too coarse for peak analysis (needs < {limit})")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("time must be non-negative (got {0})")]
    NegativeTime(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
