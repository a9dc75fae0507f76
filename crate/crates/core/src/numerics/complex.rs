//! Dense complex vectors and matrices with the contract checks the rest of
//! the crate relies on. Storage is row-major `Complex64`.

use num_complex::Complex64;

use super::STATE_NORM_TOL;
use crate::error::{Error, Result};

/// Column vector of complex amplitudes.
#[derive(Debug, Clone)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Basis state with a single unit entry at `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = Self::zeros(dim);
        v.data[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Error unless ‖v‖² is within [`STATE_NORM_TOL`] of one.
    pub fn check_normalized(&self) -> Result<()> {
        let defect = (self.norm_sqr() - 1.0).abs();
        if defect > STATE_NORM_TOL {
            Err(Error::NotNormalized { defect })
        } else {
            Ok(())
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    /// ⟨self|other⟩, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.data[i] * other.data[j].conj()
        })
    }

    /// Largest entrywise |a − b|. Dimensions must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            out.push(
                self.row(i)
                    .iter()
                    .zip(v.data())
                    .map(|(a, b)| a * b)
                    .sum(),
            );
        }
        Ok(ComplexVector::new(out))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |a, b| a - b)
    }

    fn zip_entries(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Kronecker product, `self` on the high-index side.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// `exp`-fold repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, exp: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..exp {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows, other.rows, "matrix row mismatch");
        assert_eq!(self.cols, other.cols, "matrix column mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Largest entrywise |M†M − 𝕀|; zero exactly for unitary input.
pub fn unitarity_defect(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let prod = m.adjoint().matmul(m)?;
    Ok(prod.max_abs_diff(&ComplexMatrix::identity(m.rows())))
}

/// Largest entrywise |M − M†|.
pub fn hermiticity_defect(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m.max_abs_diff(&m.adjoint()))
}

/// |⟨a|b⟩| for normalized states: one exactly when the two states differ
/// only by a global phase, zero for orthogonal states.
pub fn phase_fidelity(a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    a.check_normalized()?;
    b.check_normalized()?;
    Ok(a.inner(b)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unitarity_defect_identity_is_zero() {
        let m = ComplexMatrix::identity(2);
        assert_eq!(unitarity_defect(&m).unwrap(), 0.0);
    }

    #[test]
    fn unitarity_defect_hadamard_is_tiny() {
        let h = FRAC_1_SQRT_2;
        let m = ComplexMatrix::from_rows(&[
            vec![c(h, 0.0), c(h, 0.0)],
            vec![c(h, 0.0), c(-h, 0.0)],
        ])
        .unwrap();
        assert!(unitarity_defect(&m).unwrap() <= 1e-15);
    }

    #[test]
    fn unitarity_defect_diagonal_scaling() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!((unitarity_defect(&m).unwrap() - 3.0).abs() <= 1e-15);
    }

    #[test]
    fn unitarity_defect_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            unitarity_defect(&m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn phase_fidelity_ignores_global_phase() {
        let v = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let w = v.scaled(Complex64::from_polar(1.0, std::f64::consts::PI / 3.0));
        assert!((phase_fidelity(&v, &w).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn phase_fidelity_orthogonal_states() {
        let a = ComplexVector::basis(4, 0).unwrap();
        let b = ComplexVector::basis(4, 2).unwrap();
        assert_eq!(phase_fidelity(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn phase_fidelity_equal_superposition() {
        let v = ComplexVector::basis(2, 0).unwrap();
        let w = ComplexVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        assert!((phase_fidelity(&v, &w).unwrap() - FRAC_1_SQRT_2).abs() <= 1e-14);
    }

    #[test]
    fn phase_fidelity_is_symmetric() {
        for seed in 0..8u64 {
            let mut rng = crate::sampling::rng_from_seed(seed);
            let a = crate::sampling::random_state_vector(16, &mut rng);
            let b = crate::sampling::random_state_vector(16, &mut rng);
            let ab = phase_fidelity(&a, &b).unwrap();
            let ba = phase_fidelity(&b, &a).unwrap();
            assert!((ab - ba).abs() <= 1e-14);
        }
    }

    #[test]
    fn phase_fidelity_rejects_dim_mismatch() {
        let a = ComplexVector::basis(2, 0).unwrap();
        let b = ComplexVector::basis(4, 0).unwrap();
        assert!(matches!(
            phase_fidelity(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_matches_block_structure() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 0), c(1.0, 0.0));
        assert_eq!(k.get(1, 1), c(1.0, 0.0));
        assert_eq!(k.get(0, 2), c(2.0, 0.0));
        assert_eq!(k.get(2, 0), c(3.0, 0.0));
        assert_eq!(k.get(3, 3), c(4.0, 0.0));
        assert_eq!(k.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn pow_zero_is_identity() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        assert_eq!(a.pow(0).unwrap().max_abs_diff(&ComplexMatrix::identity(2)), 0.0);
    }
}
