//! Position-space evolution of coined walks on cyclic power-of-two lattices:
//! the conditional shift, single steps, scheduled interventions, and the
//! derived position and coin observables.

use num_complex::Complex64;

use crate::coinspace::CoinOperator;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector, STATE_NORM_TOL};

/// Cyclic lattice; every axis length is a power of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    dims: Vec<usize>,
}

impl LatticeSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("lattice needs at least one axis".into()));
        }
        for &n in &dims {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::UnsupportedSize { size: n });
            }
        }
        Ok(Self { dims })
    }

    /// One-dimensional ring.
    pub fn ring(sites: usize) -> Result<Self> {
        Self::new(vec![sites])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    /// Coin dimension a walk on this lattice carries: 2^(number of axes).
    pub fn coin_dim(&self) -> usize {
        1 << self.ndim()
    }

    /// Row-major flattening, axis 0 slowest.
    pub fn flatten(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.ndim());
        let mut flat = 0;
        for (c, n) in coords.iter().zip(&self.dims) {
            debug_assert!(c < n);
            flat = flat * n + c;
        }
        flat
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut coords = vec![0usize; self.ndim()];
        for (slot, n) in coords.iter_mut().zip(&self.dims).rev() {
            *slot = flat % n;
            flat /= n;
        }
        coords
    }

    /// Flat index for signed coordinates, wrapping cyclically.
    pub fn site_from_signed(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                expected: self.ndim(),
                found: coords.len(),
            });
        }
        let wrapped: Vec<usize> = coords
            .iter()
            .zip(&self.dims)
            .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
            .collect();
        Ok(self.flatten(&wrapped))
    }

    /// Centered signed coordinates in [−N/2, N/2) per axis.
    pub fn signed_coords(&self, flat: usize) -> Vec<i64> {
        self.unflatten(flat)
            .into_iter()
            .zip(&self.dims)
            .map(|(c, &n)| {
                if c < n / 2 {
                    c as i64
                } else {
                    c as i64 - n as i64
                }
            })
            .collect()
    }

    /// Flat index after moving by `sign * disp` with cyclic wraparound.
    pub fn translated(&self, flat: usize, disp: &[i64], sign: i64) -> usize {
        let coords = self.unflatten(flat);
        let moved: Vec<usize> = coords
            .iter()
            .zip(disp)
            .zip(&self.dims)
            .map(|((&c, &d), &n)| (c as i64 + sign * d).rem_euclid(n as i64) as usize)
            .collect();
        self.flatten(&moved)
    }

    /// Whether every axis can hold `steps` steps of light cone without
    /// wrapping, which is what makes the ring an exact stand-in for the
    /// infinite line.
    pub fn supports_steps(&self, steps: usize) -> bool {
        self.dims.iter().all(|&n| n >= 2 * steps + 2)
    }

    pub(crate) fn require_steps(&self, steps: usize) -> Result<()> {
        for &n in &self.dims {
            if n < 2 * steps + 2 {
                return Err(Error::LatticeTooSmall {
                    steps,
                    axis: n,
                    required: 2 * steps + 2,
                });
            }
        }
        Ok(())
    }
}

/// Per-coin-index unit displacement on each axis: bit i of the coin index
/// moves axis i by +1 when set and by −1 when clear.
#[derive(Debug, Clone)]
pub struct DisplacementMap {
    moves: Vec<Vec<i64>>,
}

impl DisplacementMap {
    pub fn standard(ndim: usize) -> Self {
        let coin_dim = 1usize << ndim;
        let moves = (0..coin_dim)
            .map(|c| {
                (0..ndim)
                    .map(|axis| if (c >> axis) & 1 == 1 { 1 } else { -1 })
                    .collect()
            })
            .collect();
        Self { moves }
    }

    pub fn coin_dim(&self) -> usize {
        self.moves.len()
    }

    pub fn ndim(&self) -> usize {
        self.moves.first().map_or(0, Vec::len)
    }

    pub fn displacement(&self, coin_index: usize) -> &[i64] {
        &self.moves[coin_index]
    }
}

/// What replaces the regular step at a scheduled index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterventionKind {
    /// A full walk step whose coin toss uses the alternate coin.
    AltCoinStep,
    /// The eigenbasis cyclic shift applied per momentum block, with no
    /// lattice shift. Only the momentum backend can realize it.
    EigenCycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub step: usize,
    pub kind: InterventionKind,
}

/// Ordered one-based step indices at which the walk deviates from the
/// regular coin.
#[derive(Debug, Clone)]
pub struct InterventionSchedule {
    entries: Vec<ScheduleEntry>,
    total_steps: usize,
}

impl InterventionSchedule {
    pub fn new(total_steps: usize, entries: Vec<ScheduleEntry>) -> Result<Self> {
        let mut prev = 0usize;
        for e in &entries {
            if e.step == 0 || e.step > total_steps {
                return Err(Error::InvalidSchedule {
                    reason: format!(
                        "step {} outside the run of {} steps",
                        e.step, total_steps
                    ),
                });
            }
            if e.step <= prev {
                return Err(Error::InvalidSchedule {
                    reason: format!("step indices must strictly increase (saw {})", e.step),
                });
            }
            prev = e.step;
        }
        Ok(Self {
            entries,
            total_steps,
        })
    }

    /// No interventions at all.
    pub fn plain(total_steps: usize) -> Self {
        Self {
            entries: Vec::new(),
            total_steps,
        }
    }

    /// A single intervention of `kind` as the `step`-th step.
    pub fn single(total_steps: usize, step: usize, kind: InterventionKind) -> Result<Self> {
        Self::new(total_steps, vec![ScheduleEntry { step, kind }])
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn kind_at(&self, step: usize) -> Option<InterventionKind> {
        self.entries
            .iter()
            .find(|e| e.step == step)
            .map(|e| e.kind)
    }

    pub fn has_kind(&self, kind: InterventionKind) -> bool {
        self.entries.iter().any(|e| e.kind == kind)
    }
}

/// Normalized amplitudes over (coin index, lattice site), coin index outer.
#[derive(Debug, Clone)]
pub struct WalkerState {
    lattice: LatticeSpec,
    coin_dim: usize,
    amps: Vec<Complex64>,
    step_count: usize,
}

impl WalkerState {
    /// Basis state |coin_index⟩ ⊗ |site⟩.
    pub fn localized(lattice: LatticeSpec, coin_index: usize, site: &[i64]) -> Result<Self> {
        let coin_dim = lattice.coin_dim();
        if coin_index >= coin_dim {
            return Err(Error::InvalidArgument(format!(
                "coin index {coin_index} out of range for coin dimension {coin_dim}"
            )));
        }
        let flat = lattice.site_from_signed(site)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); coin_dim * lattice.n_sites()];
        amps[coin_index * lattice.n_sites() + flat] = Complex64::new(1.0, 0.0);
        Ok(Self {
            lattice,
            coin_dim,
            amps,
            step_count: 0,
        })
    }

    /// Product state coin ⊗ position from two normalized vectors.
    pub fn from_product(
        lattice: LatticeSpec,
        coin: &ComplexVector,
        position: &ComplexVector,
    ) -> Result<Self> {
        if coin.dim() != lattice.coin_dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.coin_dim(),
                found: coin.dim(),
            });
        }
        if position.dim() != lattice.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: lattice.n_sites(),
                found: position.dim(),
            });
        }
        let mut amps = Vec::with_capacity(coin.dim() * position.dim());
        for c in 0..coin.dim() {
            for s in 0..position.dim() {
                amps.push(coin.get(c) * position.get(s));
            }
        }
        Self::from_amplitudes(lattice, amps)
    }

    /// Amplitudes laid out coin-major: `amps[c * n_sites + site]`.
    pub fn from_amplitudes(lattice: LatticeSpec, amps: Vec<Complex64>) -> Result<Self> {
        let expected = lattice.coin_dim() * lattice.n_sites();
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amps.len(),
            });
        }
        let state = Self {
            coin_dim: lattice.coin_dim(),
            lattice,
            amps,
            step_count: 0,
        };
        let defect = (state.norm_sqr() - 1.0).abs();
        if defect > STATE_NORM_TOL {
            return Err(Error::NotNormalized { defect });
        }
        Ok(state)
    }

    fn with_amps(&self, amps: Vec<Complex64>, step_count: usize) -> Self {
        Self {
            lattice: self.lattice.clone(),
            coin_dim: self.coin_dim,
            amps,
            step_count,
        }
    }

    pub(crate) fn bump_steps(&mut self, step_count: usize) {
        self.step_count = step_count;
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, coin_index: usize, site: usize) -> Complex64 {
        self.amps[coin_index * self.lattice.n_sites() + site]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// P(site) = Σ_c |amp(c, site)|².
    pub fn position_distribution(&self) -> Vec<f64> {
        let ns = self.lattice.n_sites();
        let mut dist = vec![0.0; ns];
        for c in 0..self.coin_dim {
            let block = &self.amps[c * ns..(c + 1) * ns];
            for (slot, amp) in dist.iter_mut().zip(block) {
                *slot += amp.norm_sqr();
            }
        }
        dist
    }

    /// Coin density matrix ρ = Σ_site amp(·, site) amp(·, site)†.
    pub fn coin_reduced(&self) -> ComplexMatrix {
        let ns = self.lattice.n_sites();
        ComplexMatrix::from_fn(self.coin_dim, self.coin_dim, |a, b| {
            (0..ns)
                .map(|s| self.amps[a * ns + s] * self.amps[b * ns + s].conj())
                .sum()
        })
    }

    /// Conditional translation: the amplitude at (c, x) moves to
    /// (c, x + v_c) with cyclic wraparound.
    pub fn apply_shift(&self) -> Self {
        self.shift_impl(1)
    }

    /// Inverse of [`WalkerState::apply_shift`].
    pub fn apply_shift_adjoint(&self) -> Self {
        self.shift_impl(-1)
    }

    fn shift_impl(&self, sign: i64) -> Self {
        let ns = self.lattice.n_sites();
        let map = DisplacementMap::standard(self.lattice.ndim());
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for c in 0..self.coin_dim {
            let disp = map.displacement(c);
            for s in 0..ns {
                let dest = self.lattice.translated(s, disp, sign);
                out[c * ns + dest] = self.amps[c * ns + s];
            }
        }
        self.with_amps(out, self.step_count)
    }

    /// Apply a coin-space matrix at every site; the step counter is not
    /// advanced.
    pub fn apply_coin(&self, m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != self.coin_dim || m.cols() != self.coin_dim {
            return Err(Error::DimensionMismatch {
                expected: self.coin_dim,
                found: m.rows(),
            });
        }
        let ns = self.lattice.n_sites();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for s in 0..ns {
            for a in 0..self.coin_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..self.coin_dim {
                    acc += m.get(a, b) * self.amps[b * ns + s];
                }
                out[a * ns + s] = acc;
            }
        }
        Ok(self.with_amps(out, self.step_count))
    }

    /// One walk step: coin toss then conditional shift.
    pub fn step(&self, coin: &CoinOperator) -> Result<Self> {
        let mut next = self.apply_coin(coin.matrix())?.apply_shift();
        next.step_count = self.step_count + 1;
        Ok(next)
    }

    /// One adjoint step: inverse shift then inverse coin, undoing
    /// [`WalkerState::step`]. The step counter still advances — it counts
    /// applied operations, not net forward time.
    pub fn step_adjoint(&self, coin: &CoinOperator) -> Result<Self> {
        let mut next = self
            .apply_shift_adjoint()
            .apply_coin(&coin.matrix().adjoint())?;
        next.step_count = self.step_count + 1;
        Ok(next)
    }

    /// Multiply every amplitude by a unit-modulus scalar.
    pub fn scaled(&self, z: Complex64) -> Self {
        self.with_amps(self.amps.iter().map(|a| a * z).collect(), self.step_count)
    }

    /// The full amplitude vector, coin index outer.
    pub fn as_vector(&self) -> ComplexVector {
        ComplexVector::new(self.amps.clone())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.amps.len(), other.amps.len(), "state size mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// |⟨self|other⟩|.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        crate::numerics::phase_fidelity(&self.as_vector(), &other.as_vector())
    }
}

fn check_alt_coin(
    state: &WalkerState,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
) -> Result<()> {
    if schedule.has_kind(InterventionKind::EigenCycle) {
        return Err(Error::InvalidSchedule {
            reason: "eigenbasis-cycle entries need the momentum backend".into(),
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
            Some(op) if op.dim() != state.coin_dim() => {
                return Err(Error::DimensionMismatch {
                    expected: state.coin_dim(),
                    found: op.dim(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Run the scheduled walk: the regular coin everywhere except at scheduled
/// steps, which use the alternate coin (still followed by the shift).
pub fn evolve(
    start: &WalkerState,
    coin: &CoinOperator,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
) -> Result<WalkerState> {
    let (state, _) = evolve_impl(start, coin, schedule, alt, false)?;
    Ok(state)
}

/// [`evolve`], also returning the position distribution after every step,
/// index 0 holding the initial distribution.
pub fn evolve_traced(
    start: &WalkerState,
    coin: &CoinOperator,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
) -> Result<(WalkerState, Vec<Vec<f64>>)> {
    let (state, trace) = evolve_impl(start, coin, schedule, alt, true)?;
    Ok((state, trace.expect("trace was requested")))
}

fn evolve_impl(
    start: &WalkerState,
    coin: &CoinOperator,
    schedule: &InterventionSchedule,
    alt: Option<&CoinOperator>,
    record: bool,
) -> Result<(WalkerState, Option<Vec<Vec<f64>>>)> {
    if coin.dim() != start.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: start.coin_dim(),
            found: coin.dim(),
        });
    }
    check_alt_coin(start, schedule, alt)?;
    let mut trace = if record {
        let mut t = Vec::with_capacity(schedule.total_steps() + 1);
        t.push(start.position_distribution());
        Some(t)
    } else {
        None
    };
    let mut state = start.clone();
    for step_index in 1..=schedule.total_steps() {
        state = match schedule.kind_at(step_index) {
            Some(InterventionKind::AltCoinStep) => {
                state.step(alt.expect("validated above"))?
            }
            Some(InterventionKind::EigenCycle) => unreachable!("rejected in validation"),
            None => state.step(coin)?,
        };
        if let Some(t) = trace.as_mut() {
            t.push(state.position_distribution());
        }
    }
    Ok((state, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coinspace::CoinParams;
    use std::collections::HashMap;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_moves_coin_zero_left() {
        let lattice = LatticeSpec::ring(16).unwrap();
        let s = WalkerState::localized(lattice.clone(), 0, &[5]).unwrap();
        let moved = s.apply_shift();
        assert!((moved.amp(0, 4) - c(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn shift_moves_coin_one_right() {
        let lattice = LatticeSpec::ring(16).unwrap();
        let s = WalkerState::localized(lattice, 1, &[5]).unwrap();
        let moved = s.apply_shift();
        assert!((moved.amp(1, 6) - c(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn shift_wraps_on_two_axes() {
        let lattice = LatticeSpec::new(vec![8, 8]).unwrap();
        // Coin index 0b10: bit 0 clear → axis 0 moves −1, bit 1 set → axis 1 moves +1.
        let s = WalkerState::localized(lattice.clone(), 0b10, &[0, 0]).unwrap();
        let moved = s.apply_shift();
        let dest = lattice.flatten(&[7, 1]);
        assert!((moved.amp(0b10, dest) - c(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn shift_adjoint_undoes_shift() {
        let lattice = LatticeSpec::new(vec![8, 8]).unwrap();
        let mut rng = crate::sampling::rng_from_seed(2);
        let v = crate::sampling::random_state_vector(4 * 64, &mut rng);
        let s = WalkerState::from_amplitudes(lattice, v.data().to_vec()).unwrap();
        let back = s.apply_shift().apply_shift_adjoint();
        assert!(s.max_abs_diff(&back) <= 1e-15);
    }

    #[test]
    fn hadamard_step_from_coin_zero() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice.clone(), 0, &[0]).unwrap();
        let next = s.step(&CoinOperator::hadamard()).unwrap();
        let minus_one = lattice.site_from_signed(&[-1]).unwrap();
        let plus_one = lattice.site_from_signed(&[1]).unwrap();
        assert!((next.amp(0, minus_one) - c(FRAC_1_SQRT_2, 0.0)).norm() <= 1e-15);
        assert!((next.amp(1, plus_one) - c(FRAC_1_SQRT_2, 0.0)).norm() <= 1e-15);
        assert_eq!(next.step_count(), 1);
    }

    #[test]
    fn hadamard_step_from_coin_one() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice.clone(), 1, &[0]).unwrap();
        let next = s.step(&CoinOperator::hadamard()).unwrap();
        let minus_one = lattice.site_from_signed(&[-1]).unwrap();
        let plus_one = lattice.site_from_signed(&[1]).unwrap();
        assert!((next.amp(0, minus_one) - c(FRAC_1_SQRT_2, 0.0)).norm() <= 1e-15);
        assert!((next.amp(1, plus_one) - c(-FRAC_1_SQRT_2, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn signed_identity_coin_is_conditional_shift_with_sign() {
        let lattice = LatticeSpec::ring(16).unwrap();
        let coin = CoinOperator::from_params(CoinParams::new(0.0, 0.0, 0.0).unwrap());
        let mut rng = crate::sampling::rng_from_seed(7);
        let v = crate::sampling::random_state_vector(32, &mut rng);
        let s = WalkerState::from_amplitudes(lattice.clone(), v.data().to_vec()).unwrap();
        let next = s.step(&coin).unwrap();
        assert!((next.norm_sqr() - 1.0).abs() <= 1e-14);
        let ns = lattice.n_sites();
        for site in 0..ns {
            let left = lattice.translated(site, &[-1], 1);
            let right = lattice.translated(site, &[1], 1);
            assert!((next.amp(0, left) - s.amp(0, site)).norm() <= 1e-14);
            assert!((next.amp(1, right) + s.amp(1, site)).norm() <= 1e-14);
        }
    }

    #[test]
    fn step_rejects_coin_dimension_mismatch() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice, 0, &[0]).unwrap();
        let big = CoinOperator::grover(4).unwrap();
        assert!(matches!(
            s.step(&big),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn localized_rejects_out_of_range_coin_index() {
        let lattice = LatticeSpec::ring(8).unwrap();
        assert!(WalkerState::localized(lattice, 2, &[0]).is_err());
    }

    #[test]
    fn distribution_of_localized_state_is_a_delta() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice.clone(), 0, &[0]).unwrap();
        let dist = s.position_distribution();
        assert_eq!(dist[0], 1.0);
        assert_eq!(dist.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn distribution_marginalizes_the_coin() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let coin = ComplexVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        let pos = ComplexVector::basis(8, 3).unwrap();
        let s = WalkerState::from_product(lattice, &coin, &pos).unwrap();
        let dist = s.position_distribution();
        assert!((dist[3] - 1.0).abs() <= 1e-14);
    }

    // Independent two-step oracle: enumerate amplitude paths on the integers
    // with an explicit hash map, then compare marginals.
    #[test]
    fn two_step_hadamard_matches_path_enumeration() {
        let h = FRAC_1_SQRT_2;
        let coin = [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
        let mut paths: HashMap<(usize, i64), Complex64> = HashMap::new();
        paths.insert((0, 0), c(1.0, 0.0));
        for _ in 0..2 {
            let mut next: HashMap<(usize, i64), Complex64> = HashMap::new();
            for ((ci, x), amp) in paths {
                for (co, row) in coin.iter().enumerate() {
                    let moved = x + if co == 1 { 1 } else { -1 };
                    *next.entry((co, moved)).or_insert(c(0.0, 0.0)) += row[ci] * amp;
                }
            }
            paths = next;
        }
        let mut expected: HashMap<i64, f64> = HashMap::new();
        for ((_, x), amp) in paths {
            *expected.entry(x).or_insert(0.0) += amp.norm_sqr();
        }

        let lattice = LatticeSpec::ring(16).unwrap();
        let s = WalkerState::localized(lattice.clone(), 0, &[0]).unwrap();
        let out = evolve(
            &s,
            &CoinOperator::hadamard(),
            &InterventionSchedule::plain(2),
            None,
        )
        .unwrap();
        let dist = out.position_distribution();
        for (site, p) in dist.iter().enumerate() {
            let x = lattice.signed_coords(site)[0];
            let want = expected.get(&x).copied().unwrap_or(0.0);
            assert!((p - want).abs() <= 1e-14, "site {x}: {p} vs {want}");
        }
        assert!((expected[&-2] - 0.25).abs() <= 1e-14);
    }

    #[test]
    fn coin_reduced_of_product_state_is_projector() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let chi = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let s = WalkerState::from_product(lattice, &chi, &ComplexVector::basis(8, 2).unwrap())
            .unwrap();
        let rho = s.coin_reduced();
        let target = chi.outer(&chi);
        assert!(rho.max_abs_diff(&target) <= 1e-14);
        assert!((rho.trace().unwrap() - c(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn coin_reduced_of_entangled_state_is_maximally_mixed() {
        let lattice = LatticeSpec::ring(4).unwrap();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(FRAC_1_SQRT_2, 0.0); // |0⟩_c |0⟩_x
        amps[4 + 1] = c(FRAC_1_SQRT_2, 0.0); // |1⟩_c |1⟩_x
        let s = WalkerState::from_amplitudes(lattice, amps).unwrap();
        let rho = s.coin_reduced();
        let target = ComplexMatrix::identity(2).scaled(c(0.5, 0.0));
        assert!(rho.max_abs_diff(&target) <= 1e-14);
    }

    #[test]
    fn zero_steps_leaves_state_unchanged() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice, 1, &[2]).unwrap();
        let out = evolve(
            &s,
            &CoinOperator::hadamard(),
            &InterventionSchedule::plain(0),
            None,
        )
        .unwrap();
        assert_eq!(s.max_abs_diff(&out), 0.0);
    }

    #[test]
    fn schedule_validation_rejects_bad_entries() {
        assert!(InterventionSchedule::new(
            10,
            vec![ScheduleEntry {
                step: 0,
                kind: InterventionKind::AltCoinStep
            }]
        )
        .is_err());
        assert!(InterventionSchedule::new(
            10,
            vec![ScheduleEntry {
                step: 11,
                kind: InterventionKind::AltCoinStep
            }]
        )
        .is_err());
        assert!(InterventionSchedule::new(
            10,
            vec![
                ScheduleEntry {
                    step: 3,
                    kind: InterventionKind::AltCoinStep
                },
                ScheduleEntry {
                    step: 3,
                    kind: InterventionKind::AltCoinStep
                },
            ]
        )
        .is_err());
    }

    #[test]
    fn evolve_rejects_eigen_cycles() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice, 0, &[0]).unwrap();
        let schedule =
            InterventionSchedule::single(2, 1, InterventionKind::EigenCycle).unwrap();
        assert!(matches!(
            evolve(&s, &CoinOperator::hadamard(), &schedule, None),
            Err(Error::InvalidSchedule { .. })
        ));
    }

    #[test]
    fn evolve_requires_alt_coin_when_scheduled() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let s = WalkerState::localized(lattice, 0, &[0]).unwrap();
        let schedule =
            InterventionSchedule::single(2, 1, InterventionKind::AltCoinStep).unwrap();
        assert!(matches!(
            evolve(&s, &CoinOperator::hadamard(), &schedule, None),
            Err(Error::InvalidSchedule { .. })
        ));
    }

    #[test]
    fn norm_preserved_over_long_runs_with_random_coins() {
        let lattice = LatticeSpec::ring(512).unwrap();
        let mut rng = crate::sampling::rng_from_seed(21);
        for _ in 0..4 {
            let p = crate::sampling::random_coin_params(&mut rng);
            let coin = CoinOperator::from_params(p);
            let mut s = WalkerState::localized(lattice.clone(), 1, &[0]).unwrap();
            for _ in 0..200 {
                s = s.step(&coin).unwrap();
            }
            assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            assert_eq!(s.step_count(), 200);
        }
    }

    #[test]
    fn light_cone_bounds_the_support() {
        let lattice = LatticeSpec::ring(64).unwrap();
        let mut s = WalkerState::localized(lattice.clone(), 1, &[3]).unwrap();
        let coin = CoinOperator::hadamard();
        for t in 1..=12usize {
            s = s.step(&coin).unwrap();
            let dist = s.position_distribution();
            for (site, p) in dist.iter().enumerate() {
                if *p > 1e-30 {
                    let x = lattice.signed_coords(site)[0];
                    let d = (x - 3).rem_euclid(64);
                    let cyc = d.min(64 - d);
                    assert!(cyc <= t as i64, "mass outside light cone at t={t}");
                }
            }
        }
    }

    // Conjugating the materialized shift by the intervention coin inverts
    // it, in both orders. The walk space is kron(coin, position), so the
    // coin-space lift of a 2×2 operator is kron(op, identity).
    #[test]
    fn intervention_conjugation_inverts_the_shift_matrix() {
        let lattice = LatticeSpec::ring(8).unwrap();
        let ns = lattice.n_sites();
        let dim = 2 * ns;
        let mut shift = ComplexMatrix::zeros(dim, dim);
        for coin_index in 0..2usize {
            for site in 0..ns {
                let basis_col = coin_index * ns + site;
                let dest = lattice.translated(site, &[if coin_index == 1 { 1 } else { -1 }], 1);
                shift.set(coin_index * ns + dest, basis_col, c(1.0, 0.0));
            }
        }
        let shift_adj = shift.adjoint();
        let eye = ComplexMatrix::identity(ns);
        for (p1, p2) in [(0.0, 0.0), (0.4, 1.1), (2.0, 0.9)] {
            let g = CoinOperator::intervention(p1, p2).unwrap();
            let lift = g.matrix().kron(&eye);
            let lift_adj = g.matrix().adjoint().kron(&eye);
            let a = lift_adj.matmul(&shift).unwrap().matmul(&lift).unwrap();
            assert!(a.max_abs_diff(&shift_adj) <= 1e-12);
            let b = lift.matmul(&shift).unwrap().matmul(&lift_adj).unwrap();
            assert!(b.max_abs_diff(&shift_adj) <= 1e-12);
        }
    }
}
