//! Self-contained complex linear algebra: dense matrices and vectors,
//! Hermitian and unitary eigendecomposition, power-of-two FFTs, and
//! phase-insensitive state comparison.

mod complex;
mod eigen;
mod fft;

pub use complex::{
    hermiticity_defect, phase_fidelity, unitarity_defect, ComplexMatrix, ComplexVector,
};
pub use eigen::{
    hermitian_eigendecompose, min_circular_gap, unitary_eigendecompose,
    unitary_eigendecompose_seeded, EigenSystem,
};
pub use fft::fft_nd;
pub(crate) use fft::fft_nd_in_place;

/// Defect at or below which a matrix counts as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// |‖v‖² − 1| at or below which a vector counts as a normalized state.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Largest entrywise defect allowed when rebuilding a matrix from its
/// eigensystem.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Circular eigenphase gap at or below which a spectrum counts as degenerate.
pub const DEGENERACY_GAP_TOL: f64 = 1e-8;

/// Off-diagonal Frobenius norm target for the Jacobi sweep.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Sweep budget for the Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Seed for the eigensolver's splitting draws when the caller supplies none.
pub const DEFAULT_EIGEN_SEED: u64 = 0x5eed_c0de;
