//! Momentum-space view of the walk. Each step is block-diagonal over the
//! momentum grid, one coin-sized unitary per k-point, which makes three
//! things cheap: an independent evolution backend, spectral decompositions
//! of the per-k blocks, and the eigenbasis-cycle intervention that returns
//! a walker of any dimension to its starting position.
//!
//! The cycle operator permutes the eigenvectors of a block cyclically. Its
//! power/product closed forms and the resulting full-cycle reduction are
//! checked numerically against direct matrix products; the return protocol
//! alternates one cycle with l block steps until the pattern closes after
//! 2^n rounds, at which point every k-block has collapsed to the same
//! global phase (the block determinant is k-independent because the per-axis
//! displacements of the coin basis sum to zero).

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::coinspace::CoinOperator;
use crate::error::{Error, Result};
use crate::numerics::{
    fft_nd_in_place, min_circular_gap, unitary_eigendecompose_seeded, ComplexMatrix,
    ComplexVector, DEFAULT_EIGEN_SEED, DEGENERACY_GAP_TOL,
};
use crate::walk::{InterventionKind, InterventionSchedule, LatticeSpec, WalkerState};

pub use crate::walk::DisplacementMap;

/// Momentum points conjugate to a position lattice: k_i = 2π j_i / N_i.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    dims: Vec<usize>,
}

impl MomentumGrid {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        LatticeSpec::new(dims.clone())?;
        Ok(Self { dims })
    }

    pub fn from_lattice(lattice: &LatticeSpec) -> Self {
        Self {
            dims: lattice.dims().to_vec(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn n_points(&self) -> usize {
        self.dims.iter().product()
    }

    /// Momentum components for a row-major flat index.
    pub fn k_at(&self, mut flat: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.ndim()];
        for (slot, &n) in coords.iter_mut().zip(&self.dims).rev() {
            *slot = TAU * (flat % n) as f64 / n as f64;
            flat /= n;
        }
        coords
    }
}

/// Non-degenerate eigensystem of one momentum coin block: ascending phases
/// in [0, 2π) and a gauge-fixed orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralCoin {
    phases: Vec<f64>,
    vectors: Vec<ComplexVector>,
}

impl SpectralCoin {
    /// Assemble from parts, checking power-of-two dimension, orthonormality,
    /// and non-degeneracy. Vectors need not be in the fixed gauge — any
    /// consistent phase choice works for the cycle constructions.
    pub fn from_parts(phases: Vec<f64>, vectors: Vec<ComplexVector>) -> Result<Self> {
        let dim = phases.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::UnsupportedSize { size: dim });
        }
        if vectors.len() != dim || vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vectors.len(),
            });
        }
        for w in &phases {
            if !(0.0..TAU).contains(w) {
                return Err(Error::ParamOutOfRange {
                    name: "phase",
                    value: *w,
                    lo: 0.0,
                    hi: TAU,
                });
            }
        }
        let gap = min_circular_gap(&phases);
        if gap <= DEGENERACY_GAP_TOL {
            return Err(Error::DegenerateSpectrum { min_gap: gap });
        }
        let candidate = Self { phases, vectors };
        let ortho = candidate.orthonormality_defect();
        if ortho > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "eigenvectors are not orthonormal (defect {ortho:.3e})"
            )));
        }
        Ok(candidate)
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    /// Σ e^{iω_j} |φ_j⟩⟨φ_j|
    pub fn reconstruct(&self) -> ComplexMatrix {
        power_via_spectrum(self, 1)
    }

    fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let g = a.inner(b).expect("uniform dims");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    fn phase_product(&self, t: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.phases.iter().sum::<f64>() * t as f64)
    }
}

/// Momentum coin block Diag(e^{−i k·v_c}) · C: the coin toss with each
/// basis row picking up the translation phase of its displacement.
pub fn momentum_coin_block(
    coin: &CoinOperator,
    k: &[f64],
    map: &DisplacementMap,
) -> Result<ComplexMatrix> {
    if map.coin_dim() != coin.dim() {
        return Err(Error::DimensionMismatch {
            expected: coin.dim(),
            found: map.coin_dim(),
        });
    }
    if k.len() != map.ndim() {
        return Err(Error::DimensionMismatch {
            expected: map.ndim(),
            found: k.len(),
        });
    }
    let dim = coin.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for c in 0..dim {
        let angle: f64 = k
            .iter()
            .zip(map.displacement(c))
            .map(|(ki, &vi)| ki * vi as f64)
            .sum();
        let phase = Complex64::from_polar(1.0, -angle);
        for j in 0..dim {
            out.set(c, j, phase * coin.matrix().get(c, j));
        }
    }
    Ok(out)
}

/// [`spectral_decompose_seeded`] with the crate default seed.
pub fn spectral_decompose(block: &ComplexMatrix) -> Result<SpectralCoin> {
    spectral_decompose_seeded(block, DEFAULT_EIGEN_SEED)
}

/// Strict eigendecomposition of a momentum coin block.
pub fn spectral_decompose_seeded(block: &ComplexMatrix, seed: u64) -> Result<SpectralCoin> {
    if !block.rows().is_power_of_two() {
        return Err(Error::UnsupportedSize { size: block.rows() });
    }
    let eig = unitary_eigendecompose_seeded(block, true, seed)?;
    Ok(SpectralCoin {
        phases: eig.values,
        vectors: eig.vectors,
    })
}

/// Cyclic shift on the eigenbasis: |φ_j⟩ ↦ |φ_{j+1}⟩, the last eigenvector
/// wrapping to the first. Unitary, and its dim-th power is the identity.
pub fn eigenbasis_cycle(sc: &SpectralCoin) -> ComplexMatrix {
    let dim = sc.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        let next = (j + 1) % dim;
        out = out
            .add(&sc.vectors[next].outer(&sc.vectors[j]))
            .expect("square accumulation");
    }
    out
}

/// Σ e^{iω_j t} |φ_j⟩⟨φ_j| — the t-step power of the block, assembled from
/// the spectrum instead of by multiplication.
pub fn power_via_spectrum(sc: &SpectralCoin, t: usize) -> ComplexMatrix {
    let dim = sc.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (w, v) in sc.phases.iter().zip(&sc.vectors) {
        out = out
            .add(&v.outer(v).scaled(Complex64::from_polar(1.0, w * t as f64)))
            .expect("square accumulation");
    }
    out
}

fn phase_run(sc: &SpectralCoin, t: usize, indices: impl Iterator<Item = usize>) -> Complex64 {
    let mut angle = 0.0;
    for i in indices {
        angle += sc.phases[i] * t as f64;
    }
    Complex64::from_polar(1.0, angle)
}

/// Closed form for the m-th power of (block^t · cycle), 1 ≤ m ≤ dim − 1:
/// every matrix element is a product of m eigenphases attached to one
/// |φ_K⟩⟨φ_{K−m}| hop (indices cyclic). Evaluating it term by term and
/// comparing against the direct product is the numerical induction proof.
pub fn cycle_power_closed_form(sc: &SpectralCoin, t: usize, m: usize) -> Result<ComplexMatrix> {
    let dim = sc.dim();
    if m == 0 || m >= dim {
        return Err(Error::InvalidArgument(format!(
            "power {m} outside 1..={}",
            dim - 1
        )));
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    // Hops without wraparound: K runs over m+1..=dim (one-based), picking up
    // the phases at K−m+1..=K.
    for k in (m + 1)..=dim {
        let coeff = phase_run(sc, t, (k - m + 1..=k).map(|p| p - 1));
        out = out.add(&sc.vectors[k - 1].outer(&sc.vectors[k - m - 1]).scaled(coeff))?;
    }
    // Wrapped hops: landing index j ≤ m−1 takes phases 1..=j plus the top
    // m−j indices.
    for j in 1..=(m.saturating_sub(1)) {
        let low = phase_run(sc, t, (1..=j).map(|p| p - 1));
        let high = phase_run(sc, t, (0..(m - j)).map(|v| dim - v - 1));
        out = out.add(
            &sc.vectors[j - 1]
                .outer(&sc.vectors[dim - (m - j) - 1])
                .scaled(low * high),
        )?;
    }
    // The hop that lands exactly on index m, sourced from the last
    // eigenvector.
    let coeff = phase_run(sc, t, (1..=m).map(|p| p - 1));
    out = out.add(&sc.vectors[m - 1].outer(&sc.vectors[dim - 1]).scaled(coeff))?;
    Ok(out)
}

/// Result of checking the full-cycle reduction
/// (block^t · cycle)^(dim−1) · block^t = (Π_j e^{iω_j t}) · cycle†.
#[derive(Debug, Clone)]
pub struct CycleIdentityReport {
    /// Π_j e^{iω_j t}
    pub phase: Complex64,
    /// Largest entrywise deviation between the directly multiplied left side
    /// and the phased adjoint cycle.
    pub max_defect: f64,
    /// Largest deviation of any per-landing-index phase product from the
    /// full product (they are all rearrangements of the same factors).
    pub phase_identity_defect: f64,
}

/// Check the full-cycle reduction by direct multiplication.
pub fn verify_cycle_identity(sc: &SpectralCoin, t: usize) -> Result<CycleIdentityReport> {
    let dim = sc.dim();
    let cycle = eigenbasis_cycle(sc);
    let block_t = sc.reconstruct().pow(t)?;
    let hop = block_t.matmul(&cycle)?;
    let lhs = hop.pow(dim - 1)?.matmul(&block_t)?;

    let phase = sc.phase_product(t);
    let rhs = cycle.adjoint().scaled(phase);
    let max_defect = lhs.max_abs_diff(&rhs);

    let mut phase_identity_defect: f64 = 0.0;
    for j in 1..dim {
        let low = phase_run(sc, t, (1..j).map(|p| p - 1));
        let high = phase_run(sc, t, (0..(dim - j)).map(|v| dim - v - 1));
        let own = Complex64::from_polar(1.0, sc.phases[j - 1] * t as f64);
        phase_identity_defect = phase_identity_defect.max((low * high * own - phase).norm());
    }

    Ok(CycleIdentityReport {
        phase,
        max_defect,
        phase_identity_defect,
    })
}

fn degenerate_at(k: Vec<f64>, err: Error) -> Error {
    match err {
        Error::DegenerateSpectrum { min_gap } => Error::DegenerateAtMomentum { k, min_gap },
        other => other,
    }
}

/// [`momentum_evolve_seeded`] with the crate default seed.
pub fn momentum_evolve(
    start: &WalkerState,
    coin: &CoinOperator,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
) -> Result<WalkerState> {
    momentum_evolve_seeded(start, coin, schedule, alt, DEFAULT_EIGEN_SEED)
}

/// Run the scheduled walk in the momentum picture: transform to the grid,
/// apply one coin-sized block per k and step, transform back.
///
/// Scheduled alternate-coin steps use the alternate coin's own momentum
/// block (so they still carry the shift); eigenbasis-cycle steps apply the
/// cycle of the regular coin's block with no shift attached.
pub fn momentum_evolve_seeded(
    start: &WalkerState,
    coin: &CoinOperator,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
    seed: u64,
) -> Result<WalkerState> {
    if coin.dim() != start.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: start.coin_dim(),
            found: coin.dim(),
        });
    }
    if schedule.has_kind(InterventionKind::AltCoinStep) {
        match alt {
            None => {
                return Err(Error::InvalidSchedule {
                    reason: "schedule has alternate-coin steps but no alternate coin was given"
                        .into(),
                })
            }
            Some(op) if op.dim() != start.coin_dim() => {
                return Err(Error::DimensionMismatch {
                    expected: start.coin_dim(),
                    found: op.dim(),
                })
            }
            Some(_) => {}
        }
    }

    let lattice = start.lattice().clone();
    let dims = lattice.dims().to_vec();
    let ns = lattice.n_sites();
    let d = start.coin_dim();
    let map = DisplacementMap::standard(lattice.ndim());
    let grid = MomentumGrid::from_lattice(&lattice);

    let mut data = start.amps().to_vec();
    for c in 0..d {
        fft_nd_in_place(&mut data[c * ns..(c + 1) * ns], &dims, false)?;
    }

    let blocks: Vec<ComplexMatrix> = (0..ns)
        .map(|s| momentum_coin_block(coin, &grid.k_at(s), &map))
        .collect::<Result<_>>()?;
    let alt_blocks: Option<Vec<ComplexMatrix>> = match alt {
        Some(op) if schedule.has_kind(InterventionKind::AltCoinStep) => Some(
            (0..ns)
                .map(|s| momentum_coin_block(op, &grid.k_at(s), &map))
                .collect::<Result<_>>()?,
        ),
        _ => None,
    };
    let cycles: Option<Vec<ComplexMatrix>> = if schedule.has_kind(InterventionKind::EigenCycle) {
        let mut list = Vec::with_capacity(ns);
        for (s, block) in blocks.iter().enumerate() {
            let sc = spectral_decompose_seeded(block, seed)
                .map_err(|e| degenerate_at(grid.k_at(s), e))?;
            list.push(eigenbasis_cycle(&sc));
        }
        Some(list)
    } else {
        None
    };

    let mut scratch = vec![Complex64::new(0.0, 0.0); d];
    for step_index in 1..=schedule.total_steps() {
        let mats: &[ComplexMatrix] = match schedule.kind_at(step_index) {
            None => &blocks,
            Some(InterventionKind::AltCoinStep) => {
                alt_blocks.as_deref().expect("validated above")
            }
            Some(InterventionKind::EigenCycle) => cycles.as_deref().expect("built above"),
        };
        for s in 0..ns {
            let m = &mats[s];
            for (a, slot) in scratch.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..d {
                    acc += m.get(a, b) * data[b * ns + s];
                }
                *slot = acc;
            }
            for (a, value) in scratch.iter().enumerate() {
                data[a * ns + s] = *value;
            }
        }
    }

    for c in 0..d {
        fft_nd_in_place(&mut data[c * ns..(c + 1) * ns], &dims, true)?;
    }
    let mut out = WalkerState::from_amplitudes(lattice, data)?;
    out.bump_steps(start.step_count() + schedule.total_steps());
    Ok(out)
}

/// Outcome of the multi-round return protocol.
#[derive(Debug, Clone)]
pub struct ProtocolReport {
    /// |⟨ψ₀|ψ_final⟩| — one when the walker came back exactly.
    pub fidelity: f64,
    /// ⟨ψ₀|ψ_final⟩, the accumulated global phase when the fidelity is one.
    pub phase: Complex64,
    /// Steps applied, counting each eigenbasis cycle as a step: 2^n (l+1).
    pub total_steps: usize,
}

/// [`run_reversal_protocol_seeded`] with the crate default seed.
pub fn run_reversal_protocol(
    start: &WalkerState,
    coin: &CoinOperator,
    segment_len: usize,
) -> Result<(WalkerState, ProtocolReport)> {
    run_reversal_protocol_seeded(start, coin, segment_len, DEFAULT_EIGEN_SEED)
}

/// Alternate one eigenbasis cycle with `segment_len` regular steps, 2^n
/// rounds in total, which returns any walker to its initial state up to a
/// global phase. Fails with the offending momentum when some coin block is
/// degenerate.
pub fn run_reversal_protocol_seeded(
    start: &WalkerState,
    coin: &CoinOperator,
    segment_len: usize,
    seed: u64,
) -> Result<(WalkerState, ProtocolReport)> {
    if segment_len == 0 {
        return Err(Error::InvalidArgument("segment length must be positive".into()));
    }
    let d = start.coin_dim();
    let total = d * (segment_len + 1);
    let entries: Vec<_> = (0..d)
        .map(|round| crate::walk::ScheduleEntry {
            step: 1 + round * (segment_len + 1),
            kind: InterventionKind::EigenCycle,
        })
        .collect();
    let schedule = InterventionSchedule::new(total, entries)?;
    let final_state = momentum_evolve_seeded(start, coin, &schedule, None, seed)?;
    let phase = start
        .as_vector()
        .inner(&final_state.as_vector())?;
    Ok((
        final_state,
        ProtocolReport {
            fidelity: phase.norm(),
            phase,
            total_steps: total,
        },
    ))
}
