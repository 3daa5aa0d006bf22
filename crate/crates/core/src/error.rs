use thiserror::Error;

/// Errors produced by the estimation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("dense data has {len} values but shape is {rows}x{cols}")]
    DataLength { len: usize, rows: usize, cols: usize },
    #[error("entry ({row}, {col}) lies outside a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero matrix has no sampling distribution")]
    ZeroMatrix,
    #[error("{name} must lie in the open interval (0, 1), got {value}")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("{name} must be at least 1")]
    ZeroCount { name: &'static str },
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("experiment needs at least {min} trials, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error("iterate annihilated")]
    IterateAnnihilated,
    #[error("oracle restricted to desk scale: dimension {dim} exceeds cap {cap}")]
    OracleTooLarge { dim: usize, cap: usize },
    #[error("Jacobi rotations did not converge after {sweeps} sweeps (off-diagonal norm {off_diag_norm:e})")]
    NotConverged { sweeps: usize, off_diag_norm: f64 },
}

/// Coarse failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The matrix itself is malformed.
    Input,
    /// A tolerance, count or other request parameter is invalid.
    Parameter,
    /// A numerical routine failed on otherwise valid input.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::EmptyShape { .. }
            | Error::DataLength { .. }
            | Error::IndexOutOfBounds { .. }
            | Error::NonFinite { .. } => ErrorKind::Input,
            Error::DimensionMismatch { .. }
            | Error::OutOfUnitInterval { .. }
            | Error::ZeroCount { .. }
            | Error::NotPositive { .. }
            | Error::TooFewTrials { .. } => ErrorKind::Parameter,
            Error::ZeroMatrix
            | Error::IterateAnnihilated
            | Error::OracleTooLarge { .. }
            | Error::NotConverged { .. } => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval { name, value })
    }
}

pub(crate) fn check_count(name: &'static str, value: usize) -> Result<()> {
    if value >= 1 {
        Ok(())
    } else {
        Err(Error::ZeroCount { name })
    }
}
