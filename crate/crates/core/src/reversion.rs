//! Executable checks for the intervention effects: the dual-path reversal
//! identity, return to the starting position, the periodic routine with its
//! asynchronous position and coin periods, and intervention-time scans.

use num_complex::Complex64;

use crate::coinspace::{residual_coin, CoinOperator, CoinParams};
use crate::error::{Error, Result};
use crate::walk::{evolve, InterventionKind, InterventionSchedule, WalkerState};

/// Tolerance used when matching distributions or states for recurrence.
pub const PERIOD_TOL: f64 = 1e-9;

/// Outcome of a reversal check.
#[derive(Debug, Clone)]
pub struct ReversionReport {
    /// |⟨stepped | predicted⟩|.
    pub lhs_rhs_fidelity: f64,
    /// Classical fidelity between the final and initial position marginals;
    /// for a walker that started on a single site this is exactly the final
    /// probability at that site.
    pub position_return_probability: f64,
    /// Largest per-site difference between final and initial marginals.
    pub marginal_defect: f64,
    /// Largest amplitude difference between the stepped state and the
    /// phased prediction.
    pub max_amplitude_defect: f64,
    /// The predicted global phase (−e^{i(φ₁+φ₂)})^(t₂+1); unit modulus.
    pub phase_factor: Complex64,
    pub t1: usize,
    pub t2: usize,
    pub params: CoinParams,
}

/// Detected recurrence structure of the periodic routine.
#[derive(Debug, Clone)]
pub struct PeriodReport {
    /// Smallest confirmed period of the position marginal.
    pub position_period: Option<usize>,
    /// Smallest confirmed period of the full state up to a global phase.
    pub full_state_period: Option<usize>,
    /// Number of steps examined.
    pub scan_horizon: usize,
    /// Largest marginal defect seen at multiples of the position period.
    pub position_recurrence_defect: f64,
    /// Smallest state fidelity seen at multiples of the full-state period.
    pub state_recurrence_fidelity: f64,
}

/// One row of an intervention-time scan.
#[derive(Debug, Clone)]
pub struct ScanEntry {
    /// `None` marks the no-intervention baseline.
    pub intervention_step: Option<usize>,
    /// Signed coordinate of the distribution peak (smallest coordinate on
    /// ties).
    pub peak_site: i64,
    pub peak_probability: f64,
    /// Total mass on strictly negative coordinates.
    pub negative_mass: f64,
}

fn distribution_fidelity(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum::<f64>()
        .powi(2)
}

fn max_site_diff(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn matched_pair(p: CoinParams) -> Result<(CoinOperator, CoinOperator)> {
    Ok((
        CoinOperator::from_params(p),
        CoinOperator::intervention(p.phi1(), p.phi2())?,
    ))
}

/// Phase (−e^{i(φ₁+φ₂)})^count.
fn intervention_phase(p: CoinParams, count: usize) -> Complex64 {
    Complex64::from_polar(
        1.0,
        count as f64 * (p.phase_sum() + std::f64::consts::PI),
    )
}

/// Check that stepping t₁ regular steps, one intervention step, then t₂
/// regular steps lands on the phased adjoint-path prediction
/// (−e^{i(φ₁+φ₂)})^(t₂+1) (𝕀⊗D) (U†)^(t₂+1) U^(t₁) |ψ₀⟩, with both sides
/// computed by independent evolution routes.
pub fn verify_reversal_identity(
    psi0: &WalkerState,
    p: CoinParams,
    t1: usize,
    t2: usize,
) -> Result<ReversionReport> {
    let total = t1 + t2 + 1;
    psi0.lattice().require_steps(total)?;
    let (coin, alt) = matched_pair(p)?;
    let residual = residual_coin(&coin, &alt)?;

    let mut mid = psi0.clone();
    for _ in 0..t1 {
        mid = mid.step(&coin)?;
    }

    let mut stepped = mid.step(&alt)?;
    for _ in 0..t2 {
        stepped = stepped.step(&coin)?;
    }

    let mut predicted = mid;
    for _ in 0..=t2 {
        predicted = predicted.step_adjoint(&coin)?;
    }
    let phase = intervention_phase(p, t2 + 1);
    let predicted = predicted.apply_coin(residual.matrix())?.scaled(phase);

    let initial_dist = psi0.position_distribution();
    let final_dist = stepped.position_distribution();
    Ok(ReversionReport {
        lhs_rhs_fidelity: stepped.fidelity(&predicted)?,
        position_return_probability: distribution_fidelity(&final_dist, &initial_dist),
        marginal_defect: max_site_diff(&final_dist, &initial_dist),
        max_amplitude_defect: stepped.max_abs_diff(&predicted),
        phase_factor: phase,
        t1,
        t2,
        params: p,
    })
}

/// Run t₁ = l, t₂ = l − 1 (one intervention as step l+1 of 2l total) and
/// check the walker's position marginal is restored while the coin picks up
/// the residual rotation: final = (−e^{i(φ₁+φ₂)})^l (𝕀⊗D) |ψ₀⟩.
pub fn verify_return_to_origin(
    psi0: &WalkerState,
    p: CoinParams,
    l: usize,
) -> Result<ReversionReport> {
    if l == 0 {
        return Err(Error::InvalidArgument(
            "return check needs at least one leading step".into(),
        ));
    }
    let total = 2 * l;
    psi0.lattice().require_steps(total)?;
    let (coin, alt) = matched_pair(p)?;
    let residual = residual_coin(&coin, &alt)?;

    let schedule =
        InterventionSchedule::single(total, l + 1, InterventionKind::AltCoinStep)?;
    let stepped = evolve(psi0, &coin, &schedule, Some(&alt))?;

    let phase = intervention_phase(p, l);
    let predicted = psi0.apply_coin(residual.matrix())?.scaled(phase);

    let initial_dist = psi0.position_distribution();
    let final_dist = stepped.position_distribution();
    Ok(ReversionReport {
        lhs_rhs_fidelity: stepped.fidelity(&predicted)?,
        position_return_probability: distribution_fidelity(&final_dist, &initial_dist),
        marginal_defect: max_site_diff(&final_dist, &initial_dist),
        max_amplitude_defect: stepped.max_abs_diff(&predicted),
        phase_factor: phase,
        t1: l,
        t2: l - 1,
        params: p,
    })
}

/// Run the periodic routine: l regular steps, then an intervention step
/// every 2l steps, for `cycles` interventions. Detects the recurrence
/// period of the position marginal and of the full state (up to global
/// phase). A period is only reported once it has been observed at least
/// twice and holds at every multiple inside the horizon.
pub fn run_periodic(
    psi0: &WalkerState,
    p: CoinParams,
    l: usize,
    cycles: usize,
) -> Result<(PeriodReport, Vec<Vec<f64>>)> {
    if l == 0 {
        return Err(Error::InvalidArgument("segment length must be positive".into()));
    }
    if cycles == 0 {
        return Err(Error::InvalidArgument("need at least one cycle".into()));
    }
    let (coin, alt) = matched_pair(p)?;
    let horizon = l + 2 * l * cycles;
    let entries: Vec<_> = (0..cycles)
        .map(|j| crate::walk::ScheduleEntry {
            step: l + 1 + 2 * l * j,
            kind: InterventionKind::AltCoinStep,
        })
        .collect();
    let schedule = InterventionSchedule::new(horizon, entries)?;

    let initial_dist = psi0.position_distribution();
    let mut trace = Vec::with_capacity(horizon + 1);
    trace.push(initial_dist.clone());
    let mut marginal_defects = vec![0.0f64];
    let mut fidelities = vec![1.0f64];

    let mut state = psi0.clone();
    for step_index in 1..=horizon {
        state = match schedule.kind_at(step_index) {
            Some(InterventionKind::AltCoinStep) => state.step(&alt)?,
            Some(InterventionKind::EigenCycle) => unreachable!(),
            None => state.step(&coin)?,
        };
        let dist = state.position_distribution();
        marginal_defects.push(max_site_diff(&dist, &initial_dist));
        fidelities.push(state.fidelity(psi0)?);
        trace.push(dist);
    }

    let (position_period, position_recurrence_defect) =
        detect_period(&marginal_defects, |d| *d <= PERIOD_TOL, |d| *d, f64::max);
    let (full_state_period, state_recurrence_fidelity) = detect_period(
        &fidelities,
        |f| *f >= 1.0 - PERIOD_TOL,
        |f| *f,
        f64::min,
    );

    Ok((
        PeriodReport {
            position_period,
            full_state_period,
            scan_horizon: horizon,
            position_recurrence_defect,
            state_recurrence_fidelity: if full_state_period.is_some() {
                state_recurrence_fidelity
            } else {
                0.0
            },
        },
        trace,
    ))
}

/// First index t ≥ 1 whose sample matches, confirmed at every multiple of t
/// within the horizon and observed at least twice.
fn detect_period<T>(
    samples: &[T],
    matches: impl Fn(&T) -> bool,
    value: impl Fn(&T) -> f64,
    fold: impl Fn(f64, f64) -> f64,
) -> (Option<usize>, f64) {
    let horizon = samples.len() - 1;
    let Some(first) = (1..=horizon).find(|&t| matches(&samples[t])) else {
        return (None, 0.0);
    };
    if 2 * first > horizon {
        return (None, 0.0);
    }
    let mut extreme = value(&samples[first]);
    let mut t = 2 * first;
    while t <= horizon {
        if !matches(&samples[t]) {
            return (None, 0.0);
        }
        extreme = fold(extreme, value(&samples[t]));
        t += first;
    }
    (Some(first), extreme)
}

/// For every candidate step j, run the walk with the intervention as the
/// j-th step and record where the final distribution peaks and how much
/// mass sits at negative coordinates. Entry 0 is the no-intervention
/// baseline. One-dimensional lattices only.
pub fn scan_intervention_times(
    psi0: &WalkerState,
    p: CoinParams,
    total_steps: usize,
) -> Result<Vec<ScanEntry>> {
    if psi0.lattice().ndim() != 1 {
        return Err(Error::InvalidArgument(
            "intervention scans are defined on one-dimensional lattices".into(),
        ));
    }
    if total_steps < 2 {
        return Err(Error::InvalidArgument(
            "scan needs at least two steps".into(),
        ));
    }
    let (coin, alt) = matched_pair(p)?;
    let mut entries = Vec::with_capacity(total_steps + 1);

    let baseline = evolve(psi0, &coin, &InterventionSchedule::plain(total_steps), None)?;
    entries.push(summarize(&baseline, None));

    for j in 1..=total_steps {
        let schedule =
            InterventionSchedule::single(total_steps, j, InterventionKind::AltCoinStep)?;
        let state = evolve(psi0, &coin, &schedule, Some(&alt))?;
        entries.push(summarize(&state, Some(j)));
    }
    Ok(entries)
}

fn summarize(state: &WalkerState, intervention_step: Option<usize>) -> ScanEntry {
    let lattice = state.lattice();
    let dist = state.position_distribution();
    let coords: Vec<i64> = (0..dist.len())
        .map(|s| lattice.signed_coords(s)[0])
        .collect();
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by_key(|&s| coords[s]);
    let mut peak_site = coords[order[0]];
    let mut peak_probability = dist[order[0]];
    let mut negative_mass = 0.0;
    for &s in &order {
        if dist[s] > peak_probability {
            peak_probability = dist[s];
            peak_site = coords[s];
        }
        if coords[s] < 0 {
            negative_mass += dist[s];
        }
    }
    ScanEntry {
        intervention_step,
        peak_site,
        peak_probability,
        negative_mass,
    }
}
