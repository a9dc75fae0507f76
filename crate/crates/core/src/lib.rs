//! Simulation and verification toolkit for coined quantum walks with
//! scheduled coin-space interventions.
//!
//! A discrete-time walker on a cyclic lattice carries a coin register; each
//! step tosses the coin and shifts the walker conditionally. Swapping an
//! antidiagonal coin in for a single scheduled step makes the subsequent
//! evolution retrace the walk, which this crate turns into executable
//! checks: the dual-path reversal identity, return to the starting
//! position, periodic walks whose coin period doubles the position period,
//! peak steering via intervention-time scans, and a multi-round protocol
//! that returns walkers of any dimension through cyclic shifts on the
//! momentum-block eigenbasis. Two independent backends (position-space
//! stepping and momentum-space block evolution) cross-validate each other.

pub mod coinspace;
pub mod error;
pub mod numerics;
pub mod reversion;
pub mod sampling;
pub mod spectral;
pub mod walk;

pub use coinspace::{residual_coin, CoinOperator, CoinOrigin, CoinParams};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{
    fft_nd, phase_fidelity, unitarity_defect, ComplexMatrix, ComplexVector, EigenSystem,
};
pub use walk::{
    evolve, evolve_traced, InterventionKind, InterventionSchedule, LatticeSpec, ScheduleEntry,
    WalkerState,
};
