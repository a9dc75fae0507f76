//! Coin-space operators: the parameterized 2×2 coin family, the antidiagonal
//! intervention coin, their composite, and tensor products for multi-axis
//! walks.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};
use crate::numerics::{unitarity_defect, ComplexMatrix, UNITARY_TOL};

/// Angles (θ, φ₁, φ₂) selecting one member of the general 2×2 coin family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinParams {
    theta: f64,
    phi1: f64,
    phi2: f64,
}

impl CoinParams {
    /// θ ∈ [0, 2π), φ₁ ∈ [0, π), φ₂ ∈ [0, π).
    pub fn new(theta: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::ParamOutOfRange {
                name: "theta",
                value: theta,
                lo: 0.0,
                hi: TAU,
            });
        }
        check_phi("phi1", phi1)?;
        check_phi("phi2", phi2)?;
        Ok(Self { theta, phi1, phi2 })
    }

    /// θ = π/4 with both phases zero.
    pub fn hadamard() -> Self {
        Self {
            theta: FRAC_PI_4,
            phi1: 0.0,
            phi2: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// φ₁ + φ₂, the angle that sets the coin determinant −e^{i(φ₁+φ₂)}.
    pub fn phase_sum(&self) -> f64 {
        self.phi1 + self.phi2
    }
}

fn check_phi(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..PI).contains(&value) {
        return Err(Error::ParamOutOfRange {
            name,
            value,
            lo: 0.0,
            hi: PI,
        });
    }
    Ok(())
}

/// How a coin matrix was built.
#[derive(Debug, Clone)]
pub enum CoinOrigin {
    Parametric(CoinParams),
    Explicit,
}

/// Unitary acting on the coin register; the dimension is a power of two.
#[derive(Debug, Clone)]
pub struct CoinOperator {
    matrix: ComplexMatrix,
    origin: CoinOrigin,
}

impl CoinOperator {
    /// [[cosθ, e^{iφ₁}sinθ], [e^{iφ₂}sinθ, −e^{i(φ₁+φ₂)}cosθ]]
    pub fn from_params(p: CoinParams) -> Self {
        let (st, ct) = p.theta.sin_cos();
        let matrix = ComplexMatrix::from_rows(&[
            vec![
                Complex64::new(ct, 0.0),
                Complex64::from_polar(st, p.phi1),
            ],
            vec![
                Complex64::from_polar(st, p.phi2),
                -Complex64::from_polar(ct, p.phi1 + p.phi2),
            ],
        ])
        .expect("fixed 2x2 layout");
        Self {
            matrix,
            origin: CoinOrigin::Parametric(p),
        }
    }

    pub fn hadamard() -> Self {
        Self::from_params(CoinParams::hadamard())
    }

    /// Antidiagonal coin [[0, e^{iφ₁}], [−e^{iφ₂}, 0]]; unitary for every
    /// φ₁, φ₂ ∈ [0, π). Swapping it in for the walk coin at a scheduled step
    /// is what drives the reversal effects in this crate.
    pub fn intervention(phi1: f64, phi2: f64) -> Result<Self> {
        check_phi("phi1", phi1)?;
        check_phi("phi2", phi2)?;
        let zero = Complex64::new(0.0, 0.0);
        let matrix = ComplexMatrix::from_rows(&[
            vec![zero, Complex64::from_polar(1.0, phi1)],
            vec![-Complex64::from_polar(1.0, phi2), zero],
        ])
        .expect("fixed 2x2 layout");
        Ok(Self {
            matrix,
            origin: CoinOrigin::Explicit,
        })
    }

    /// Wrap an explicit matrix; it must be square, power-of-two sized, and
    /// unitary to within [`UNITARY_TOL`].
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.rows().is_power_of_two() {
            return Err(Error::UnsupportedSize {
                size: matrix.rows(),
            });
        }
        let defect = unitarity_defect(&matrix)?;
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary {
                defect,
                tol: UNITARY_TOL,
            });
        }
        Ok(Self {
            matrix,
            origin: CoinOrigin::Explicit,
        })
    }

    /// Grover diffusion coin 2|s⟩⟨s| − 𝕀. Degenerate for dim > 2, which
    /// makes it the standard counterexample for spectrum-based routines.
    pub fn grover(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::UnsupportedSize { size: dim });
        }
        let off = 2.0 / dim as f64;
        let matrix = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(off - 1.0, 0.0)
            } else {
                Complex64::new(off, 0.0)
            }
        });
        Ok(Self {
            matrix,
            origin: CoinOrigin::Explicit,
        })
    }

    /// Kronecker product in list order; the first factor lands on the
    /// highest coin-index bits.
    pub fn tensor(parts: &[CoinOperator]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument(
                "tensor product needs at least one coin".into(),
            ));
        };
        if parts.len() == 1 {
            return Ok(first.clone());
        }
        let mut matrix = first.matrix.clone();
        for part in &parts[1..] {
            matrix = matrix.kron(&part.matrix);
        }
        Ok(Self {
            matrix,
            origin: CoinOrigin::Explicit,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn origin(&self) -> &CoinOrigin {
        &self.origin
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            origin: CoinOrigin::Explicit,
        }
    }
}

/// The coin rotation left behind by a full return: C†G.
///
/// For a matched parameter pair this evaluates to
/// [[−sinθ, e^{iφ₁}cosθ], [e^{−iφ₁}cosθ, sinθ]] — Hermitian, independent of
/// φ₂, and squaring to the identity for every (θ, φ₁, φ₂) in range, so the
/// matched composite is an involution on the whole parameter family.
pub fn residual_coin(coin: &CoinOperator, intervention: &CoinOperator) -> Result<CoinOperator> {
    if coin.dim() != intervention.dim() {
        return Err(Error::DimensionMismatch {
            expected: coin.dim(),
            found: intervention.dim(),
        });
    }
    let matrix = coin.matrix().adjoint().matmul(intervention.matrix())?;
    CoinOperator::from_matrix(matrix)
}
