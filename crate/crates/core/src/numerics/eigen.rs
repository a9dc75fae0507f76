//! Eigendecomposition via cyclic Jacobi rotations.
//!
//! The Hermitian solver is a classical two-sided Jacobi iteration with
//! complex plane rotations. Unitary matrices are handled by diagonalizing a
//! random real combination α(M + M†) + β·i(M − M†): that matrix is Hermitian
//! and shares M's eigenvectors whenever the combination separates the
//! eigenphases, which a reconstruction residual verifies after the fact.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use super::{
    hermiticity_defect, unitarity_defect, ComplexMatrix, ComplexVector, DEFAULT_EIGEN_SEED,
    DEGENERACY_GAP_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL, RECONSTRUCTION_TOL, UNITARY_TOL,
};
use crate::error::{Error, Result};

/// Ordered eigenvalues (or eigenphases) with their orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending eigenvalues; eigenphases in [0, 2π) for unitary input.
    pub values: Vec<f64>,
    /// Eigenvectors in the same order as `values`.
    pub vectors: Vec<ComplexVector>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Σ λ_j |v_j⟩⟨v_j|
    pub fn reconstruct_hermitian(&self) -> ComplexMatrix {
        self.reconstruct_with(|v| Complex64::new(v, 0.0))
    }

    /// Σ e^{iω_j} |v_j⟩⟨v_j|
    pub fn reconstruct_unitary(&self) -> ComplexMatrix {
        self.reconstruct_with(|v| Complex64::from_polar(1.0, v))
    }

    fn reconstruct_with(&self, weight: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, |v| v.dim());
        let mut out = ComplexMatrix::zeros(n, n);
        for (val, vec) in self.values.iter().zip(&self.vectors) {
            out = out
                .add(&vec.outer(vec).scaled(weight(*val)))
                .expect("square accumulation");
        }
        out
    }

    /// Largest deviation of ⟨v_i|v_j⟩ from δ_ij.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let g = a.inner(b).expect("uniform dimensions");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Smallest gap between phases viewed on the circle [0, 2π).
pub fn min_circular_gap(phases: &[f64]) -> f64 {
    if phases.len() < 2 {
        return TAU;
    }
    let mut sorted = phases.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
    let mut gap = TAU - (sorted[sorted.len() - 1] - sorted[0]);
    for pair in sorted.windows(2) {
        gap = gap.min(pair[1] - pair[0]);
    }
    gap
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi on a Hermitian matrix; returns diagonal values paired with
/// the accumulated rotation columns, unsorted.
fn jacobi(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<ComplexVector>)> {
    let n = m.rows();
    let idx = |i: usize, j: usize| i * n + j;
    let mut a: Vec<Complex64> = m.data().to_vec();
    let mut v: Vec<Complex64> = ComplexMatrix::identity(n).data().to_vec();
    let target = JACOBI_OFF_TOL.max(m.frobenius() * f64::EPSILON * n as f64);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let phase = apq / mag;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase.scale(s);
                let spc = phase.conj().scale(s);

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[idx(i, p)];
                    let aiq = a[idx(i, q)];
                    let new_ip = aip.scale(c) + spc * aiq;
                    let new_iq = -sp * aip + aiq.scale(c);
                    a[idx(i, p)] = new_ip;
                    a[idx(i, q)] = new_iq;
                    a[idx(p, i)] = new_ip.conj();
                    a[idx(q, i)] = new_iq.conj();
                }
                let new_pp = c * c * app + 2.0 * c * s * mag + s * s * aqq;
                let new_qq = s * s * app - 2.0 * c * s * mag + c * c * aqq;
                a[idx(p, p)] = Complex64::new(new_pp, 0.0);
                a[idx(q, q)] = Complex64::new(new_qq, 0.0);
                a[idx(p, q)] = Complex64::new(0.0, 0.0);
                a[idx(q, p)] = Complex64::new(0.0, 0.0);

                for i in 0..n {
                    let vip = v[idx(i, p)];
                    let viq = v[idx(i, q)];
                    v[idx(i, p)] = vip.scale(c) + spc * viq;
                    v[idx(i, q)] = -sp * vip + viq.scale(c);
                }
            }
        }
    }

    let off = off_diagonal_norm(&a, n);
    if off > target.max(1e-10) {
        return Err(Error::Convergence { off });
    }
    let values: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
    let vectors: Vec<ComplexVector> = (0..n)
        .map(|j| ComplexVector::new((0..n).map(|i| v[idx(i, j)]).collect()))
        .collect();
    Ok((values, vectors))
}

/// Eigendecompose a Hermitian matrix; values ascend.
///
/// `tol` bounds the accepted Hermiticity defect max|M − M†|.
pub fn hermitian_eigendecompose(m: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = hermiticity_defect(m)?;
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    let (values, vectors) = jacobi(m)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite values"));
    Ok(EigenSystem {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.into_iter().map(|i| vectors[i].clone()).collect(),
    })
}

fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Make the first component of significant magnitude real and positive.
fn fix_gauge(v: &ComplexVector) -> ComplexVector {
    for z in v.data() {
        let mag = z.norm();
        if mag > 1e-8 {
            return v.scaled(z.conj() / mag);
        }
    }
    v.clone()
}

/// [`unitary_eigendecompose_seeded`] with the crate default seed.
pub fn unitary_eigendecompose(m: &ComplexMatrix, strict: bool) -> Result<EigenSystem> {
    unitary_eigendecompose_seeded(m, strict, DEFAULT_EIGEN_SEED)
}

/// Eigendecompose a unitary matrix into phases ω ∈ [0, 2π), ascending, with
/// a gauge-fixed orthonormal eigenbasis (first significant component of each
/// vector real positive).
///
/// In `strict` mode any circular phase gap at or below
/// [`DEGENERACY_GAP_TOL`] is rejected as [`Error::DegenerateSpectrum`].
pub fn unitary_eigendecompose_seeded(
    m: &ComplexMatrix,
    strict: bool,
    seed: u64,
) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = unitarity_defect(m)?;
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary {
            defect,
            tol: UNITARY_TOL,
        });
    }

    let n = m.rows();
    let adj = m.adjoint();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<EigenSystem> = None;

    for _attempt in 0..5 {
        let alpha = 0.5 + unit_f64(&mut rng);
        let beta = 0.5 + unit_f64(&mut rng);
        let combo = ComplexMatrix::from_fn(n, n, |i, j| {
            let sum = m.get(i, j) + adj.get(i, j);
            let diff = m.get(i, j) - adj.get(i, j);
            sum.scale(alpha) + i_unit * diff.scale(beta)
        });
        let (_, vectors) = jacobi(&combo)?;
        let mut phases = Vec::with_capacity(n);
        for v in &vectors {
            let expectation = v.inner(&m.mul_vec(v)?)?;
            let mut w = expectation.arg();
            if w < 0.0 {
                w += TAU;
            }
            phases.push(w);
        }
        let system = EigenSystem {
            values: phases,
            vectors,
        };
        if system.reconstruct_unitary().max_abs_diff(m) <= RECONSTRUCTION_TOL * 0.1 {
            best = Some(system);
            break;
        }
        best = Some(system);
    }

    let system = best.expect("at least one attempt ran");
    if system.reconstruct_unitary().max_abs_diff(m) > RECONSTRUCTION_TOL * 0.1 {
        return Err(Error::DegenerateSpectrum {
            min_gap: min_circular_gap(&system.values),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        system.values[i]
            .partial_cmp(&system.values[j])
            .expect("finite phases")
    });
    let values: Vec<f64> = order.iter().map(|&i| system.values[i]).collect();
    let vectors: Vec<ComplexVector> = order
        .into_iter()
        .map(|i| fix_gauge(&system.vectors[i]))
        .collect();

    if strict {
        let gap = min_circular_gap(&values);
        if gap <= DEGENERACY_GAP_TOL {
            return Err(Error::DegenerateSpectrum { min_gap: gap });
        }
    }
    Ok(EigenSystem { values, vectors })
}
