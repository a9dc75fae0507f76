use thiserror::Error;

/// Errors raised across the simulation stack.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (defect {defect:.3e} exceeds {tol:.1e})")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("vector is not a normalized state (|norm^2 - 1| = {defect:.3e})")]
    NotNormalized { defect: f64 },

    #[error("size {size} is not a power of two")]
    UnsupportedSize { size: usize },

    #[error("parameter {name} = {value} outside [{lo}, {hi})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("degenerate spectrum: minimum circular eigenphase gap {min_gap:.3e}")]
    DegenerateSpectrum { min_gap: f64 },

    #[error("degenerate spectrum at momentum {k:?}: minimum circular gap {min_gap:.3e}")]
    DegenerateAtMomentum { k: Vec<f64>, min_gap: f64 },

    #[error("eigensolver failed to converge (off-diagonal norm {off:.3e})")]
    Convergence { off: f64 },

    #[error("invalid intervention schedule: {reason}")]
    InvalidSchedule { reason: String },

    #[error("lattice too small for {steps} steps: axis size {axis} < {required}")]
    LatticeTooSmall {
        steps: usize,
        axis: usize,
        required: usize,
    },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
