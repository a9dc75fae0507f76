//! One function per subcommand, all funnelling into the same
//! manifest-plus-data output shape.

use std::path::PathBuf;

use coinwalk::reversion::{
    run_periodic, scan_intervention_times, verify_return_to_origin,
};
use coinwalk::spectral::{
    momentum_coin_block, momentum_evolve_seeded, run_reversal_protocol_seeded,
    spectral_decompose_seeded, verify_cycle_identity, DisplacementMap, MomentumGrid,
};
use coinwalk::walk::{evolve, evolve_traced, InterventionKind, InterventionSchedule};
use coinwalk::{residual_coin, CoinParams, ComplexMatrix, Error as CoreError, WalkerState};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Mode};
use crate::manifest::Manifest;
use crate::output;

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Tolerance(String),
    Core(CoreError),
    Io(String),
}

impl RunError {
    pub fn from_io(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Tolerance(_) => 3,
            RunError::Core(
                CoreError::DegenerateSpectrum { .. } | CoreError::DegenerateAtMomentum { .. },
            ) => 4,
            RunError::Core(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Tolerance(msg) => write!(f, "tolerance violation: {msg}"),
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

pub struct RunOutcome {
    pub manifest: Manifest,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    match cfg.mode {
        Mode::Walk => run_walk(cfg),
        Mode::Revert => run_revert(cfg),
        Mode::Periodic => run_periodic_mode(cfg),
        Mode::Spectral => run_spectral(cfg),
        Mode::Scan => run_scan(cfg),
        Mode::Crosscheck => run_crosscheck(cfg),
    }
}

fn config_err(msg: String) -> RunError {
    RunError::Config(msg)
}

fn distribution_metrics(manifest: &mut Manifest, state: &WalkerState) {
    let lattice = state.lattice();
    let dist = state.position_distribution();
    let total: f64 = dist.iter().sum();
    manifest.number("total_probability", total);

    let sites = output::signed_sites(lattice);
    let mut peak = &sites[0];
    let mut peak_p = dist[sites[0].1];
    let mut negative = 0.0;
    for entry in &sites {
        let p = dist[entry.1];
        if p > peak_p {
            peak_p = p;
            peak = entry;
        }
        if lattice.ndim() == 1 && entry.0[0] < 0 {
            negative += p;
        }
    }
    manifest.list("peak_site", json!(peak.0));
    manifest.number("peak_probability", peak_p);
    if lattice.ndim() == 1 {
        manifest.number("negative_mass", negative);
    }
}

fn build_schedule(cfg: &ExperimentConfig, steps: usize) -> Result<InterventionSchedule, RunError> {
    InterventionSchedule::new(steps, cfg.schedule_entries.clone())
        .map_err(|e| config_err(format!("schedule: {e}")))
}

fn run_walk(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let steps = cfg.steps.expect("validated");
    let schedule = build_schedule(cfg, steps)?;
    let coin = cfg.build_coin().map_err(config_err)?;
    let alt = cfg.build_alt().map_err(config_err)?;
    if schedule.has_kind(InterventionKind::AltCoinStep) && alt.is_none() {
        return Err(config_err(
            "schedule: alternate-coin steps need coin parameters or g_phi1/g_phi2".into(),
        ));
    }
    let psi0 = cfg.build_initial().map_err(config_err)?;

    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("steps", steps);

    let (final_state, trace) = if cfg.trace {
        let (s, t) = evolve_traced(&psi0, &coin, &schedule, alt.as_ref())?;
        (s, Some(t))
    } else {
        (evolve(&psi0, &coin, &schedule, alt.as_ref())?, None)
    };

    distribution_metrics(&mut manifest, &final_state);
    let total: f64 = final_state.position_distribution().iter().sum();
    let tol = cfg.tol_or(1e-10);
    if (total - 1.0).abs() > tol {
        return Err(RunError::Tolerance(format!(
            "total probability {total} deviates from 1 by more than {tol:e}"
        )));
    }

    let dist = final_state.position_distribution();
    let mut files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_distribution_csv(path, final_state.lattice(), &dist),
        Value::Array(output::distribution_rows(final_state.lattice(), &dist)),
    )?;
    if let Some(trace) = trace {
        let trace_path = cfg.out.with_extension("trace.csv");
        output::write_trace_csv(&trace_path, final_state.lattice(), &trace)
            .map_err(RunError::from_io)?;
        files.push(trace_path);
    }
    Ok(RunOutcome { manifest, files })
}

fn required_params(cfg: &ExperimentConfig) -> Result<CoinParams, RunError> {
    if cfg.lattice.ndim() != 1 {
        return Err(config_err(format!(
            "{} mode runs on one-dimensional lattices",
            cfg.mode.name()
        )));
    }
    cfg.axis_params()
        .map(|ps| ps[0])
        .ok_or_else(|| config_err(format!("{} mode needs parametric coins (theta/phi1/phi2)", cfg.mode.name())))
}

fn run_revert(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let l = cfg.segment.expect("validated");
    let p = required_params(cfg)?;
    let psi0 = cfg.build_initial().map_err(config_err)?;
    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("l", l);
    manifest.integer("steps", 2 * l);

    let coin = cfg.build_coin().map_err(config_err)?;
    let alt = cfg
        .build_alt()
        .map_err(config_err)?
        .expect("parametric coin implies an alternate coin");
    let residual = residual_coin(&coin, &alt)?;
    let dd_defect = residual
        .matrix()
        .matmul(residual.matrix())?
        .max_abs_diff(&ComplexMatrix::identity(residual.dim()));
    manifest.number("dd_defect", dd_defect);

    let final_state = if cfg.alt_phis_mismatch() {
        // Documented unsupported path: the intervention phases do not match
        // the coin, so no return guarantee exists. Report what happened.
        manifest.warn(
            "g_phi1/g_phi2 differ from the coin phases; the return identity does not \
             apply and D\u{b7}D deviates from the identity as reported in dd_defect",
        );
        let schedule =
            InterventionSchedule::single(2 * l, l + 1, InterventionKind::AltCoinStep)?;
        let stepped = evolve(&psi0, &coin, &schedule, Some(&alt))?;
        let initial = psi0.position_distribution();
        let dist = stepped.position_distribution();
        let return_probability = initial
            .iter()
            .zip(&dist)
            .map(|(a, b)| (a * b).sqrt())
            .sum::<f64>()
            .powi(2);
        let marginal_defect = initial
            .iter()
            .zip(&dist)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        manifest.number("position_return_probability", return_probability);
        manifest.number("marginal_defect", marginal_defect);
        stepped
    } else {
        let report = verify_return_to_origin(&psi0, p, l)?;
        manifest.number(
            "position_return_probability",
            report.position_return_probability,
        );
        manifest.number("marginal_defect", report.marginal_defect);
        manifest.number("dual_path_defect", report.max_amplitude_defect);
        manifest.number("lhs_rhs_fidelity", report.lhs_rhs_fidelity);
        manifest.complex("phase_factor", report.phase_factor);
        let tol = cfg.tol_or(1e-9);
        if report.marginal_defect > tol {
            return Err(RunError::Tolerance(format!(
                "position marginal deviates by {:.3e} (tolerance {tol:e})",
                report.marginal_defect
            )));
        }
        // Re-run the stepped side for the data product.
        let schedule =
            InterventionSchedule::single(2 * l, l + 1, InterventionKind::AltCoinStep)?;
        evolve(&psi0, &coin, &schedule, Some(&alt))?
    };

    let dist = final_state.position_distribution();
    let files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_distribution_csv(path, final_state.lattice(), &dist),
        Value::Array(output::distribution_rows(final_state.lattice(), &dist)),
    )?;
    Ok(RunOutcome { manifest, files })
}

fn run_periodic_mode(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let l = cfg.segment.expect("validated");
    let cycles = cfg.cycles.expect("validated");
    let p = required_params(cfg)?;
    let psi0 = cfg.build_initial().map_err(config_err)?;
    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("l", l);
    manifest.integer("cycles", cycles);

    let (report, trace) = run_periodic(&psi0, p, l, cycles)?;
    manifest.optional_integer("position_period", report.position_period);
    manifest.optional_integer("full_state_period", report.full_state_period);
    manifest.integer("scan_horizon", report.scan_horizon);
    manifest.number(
        "position_recurrence_defect",
        report.position_recurrence_defect,
    );
    manifest.number(
        "state_recurrence_fidelity",
        report.state_recurrence_fidelity,
    );
    if let (Some(pos), Some(full)) = (report.position_period, report.full_state_period) {
        manifest.flag("coin_period_doubles_position_period", full == 2 * pos);
    }

    // Data product: per-step distributions across one full system cycle.
    let cut = report
        .full_state_period
        .unwrap_or(4 * l)
        .min(report.scan_horizon);
    let window = &trace[..=cut];
    let files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_trace_csv(path, psi0.lattice(), window),
        Value::Array(output::trace_rows(psi0.lattice(), window)),
    )?;
    Ok(RunOutcome { manifest, files })
}

fn run_spectral(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let l = cfg.segment.expect("validated");
    let coin = cfg.build_coin().map_err(config_err)?;
    let psi0 = cfg.build_initial().map_err(config_err)?;
    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("l", l);
    manifest.integer("dimension", cfg.lattice.ndim());

    let grid = MomentumGrid::from_lattice(&cfg.lattice);
    let map = DisplacementMap::standard(cfg.lattice.ndim());
    let mut cycle_defect: f64 = 0.0;
    let mut phase_defect: f64 = 0.0;
    for s in 0..grid.n_points() {
        let k = grid.k_at(s);
        let block = momentum_coin_block(&coin, &k, &map)?;
        let sc = spectral_decompose_seeded(&block, cfg.seed).map_err(|e| match e {
            CoreError::DegenerateSpectrum { min_gap } => {
                RunError::Core(CoreError::DegenerateAtMomentum { k, min_gap })
            }
            other => RunError::Core(other),
        })?;
        let report = verify_cycle_identity(&sc, l)?;
        cycle_defect = cycle_defect.max(report.max_defect);
        phase_defect = phase_defect.max(report.phase_identity_defect);
    }
    manifest.number("cycle_identity_max_defect", cycle_defect);
    manifest.number("phase_identity_max_defect", phase_defect);

    let (final_state, report) = run_reversal_protocol_seeded(&psi0, &coin, l, cfg.seed)?;
    manifest.number("protocol_fidelity", report.fidelity);
    manifest.complex("accumulated_phase", report.phase);
    manifest.integer("total_steps", report.total_steps);

    let tol = cfg.tol_or(1e-9);
    if report.fidelity < 1.0 - tol {
        return Err(RunError::Tolerance(format!(
            "protocol fidelity {} below 1 - {tol:e}",
            report.fidelity
        )));
    }

    let dist = final_state.position_distribution();
    let files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_distribution_csv(path, final_state.lattice(), &dist),
        Value::Array(output::distribution_rows(final_state.lattice(), &dist)),
    )?;
    Ok(RunOutcome { manifest, files })
}

fn run_scan(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let steps = cfg.steps.expect("validated");
    let p = required_params(cfg)?;
    let psi0 = cfg.build_initial().map_err(config_err)?;
    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("steps", steps);

    let entries = scan_intervention_times(&psi0, p, steps)?;
    let baseline = &entries[0];
    manifest.integer("entries", entries.len());
    manifest.list("baseline_peak_site", json!(baseline.peak_site));
    manifest.number("baseline_peak_probability", baseline.peak_probability);
    manifest.number("baseline_negative_mass", baseline.negative_mass);

    let files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_scan_csv(path, &entries),
        Value::Array(output::scan_rows(&entries)),
    )?;
    Ok(RunOutcome { manifest, files })
}

fn run_crosscheck(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let steps = cfg.steps.expect("validated");
    let schedule = build_schedule(cfg, steps)?;
    let coin = cfg.build_coin().map_err(config_err)?;
    let alt = cfg.build_alt().map_err(config_err)?;
    if schedule.has_kind(InterventionKind::AltCoinStep) && alt.is_none() {
        return Err(config_err(
            "schedule: alternate-coin steps need coin parameters or g_phi1/g_phi2".into(),
        ));
    }
    let psi0 = cfg.build_initial().map_err(config_err)?;
    let mut manifest = Manifest::new(cfg.mode.name(), cfg.echo.clone());
    manifest.integer("steps", steps);

    let position = evolve(&psi0, &coin, &schedule, alt.as_ref())?;
    let momentum = momentum_evolve_seeded(&psi0, &coin, &schedule, alt.as_ref(), cfg.seed)?;
    let diff = position.max_abs_diff(&momentum);
    manifest.number("max_amplitude_difference", diff);
    distribution_metrics(&mut manifest, &position);

    let tol = cfg.tol_or(1e-8);
    if diff > tol {
        return Err(RunError::Tolerance(format!(
            "backends diverged by {diff:.3e} (tolerance {tol:e})"
        )));
    }

    let dist = position.position_distribution();
    let files = output::write_output(
        cfg,
        &manifest,
        |path| output::write_distribution_csv(path, position.lattice(), &dist),
        Value::Array(output::distribution_rows(position.lattice(), &dist)),
    )?;
    Ok(RunOutcome { manifest, files })
}
