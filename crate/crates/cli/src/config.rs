//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides (overrides win), validated into typed form with
//! field-level messages.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use coinwalk::numerics::DEFAULT_EIGEN_SEED;
use coinwalk::walk::ScheduleEntry;
use coinwalk::{
    CoinOperator, CoinParams, Complex64, InterventionKind, LatticeSpec, WalkerState,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Walk,
    Revert,
    Periodic,
    Spectral,
    Scan,
    Crosscheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Walk => "walk",
            Mode::Revert => "revert",
            Mode::Periodic => "periodic",
            Mode::Spectral => "spectral",
            Mode::Scan => "scan",
            Mode::Crosscheck => "crosscheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Deserialize, Serialize, Clone, Copy)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Deserialize)]
struct CoinFileData {
    dim: usize,
    entries: Vec<ReIm>,
}

#[derive(Debug, Deserialize)]
struct StateFileData {
    coin_dim: usize,
    dims: Vec<usize>,
    amps: Vec<ReIm>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub lattice: LatticeSpec,
    coin_params: Option<Vec<CoinParams>>,
    coin_file: Option<PathBuf>,
    alt_phis: Option<(Vec<f64>, Vec<f64>)>,
    initial_basis: (usize, Vec<i64>),
    state_file: Option<PathBuf>,
    pub steps: Option<usize>,
    pub segment: Option<usize>,
    pub cycles: Option<usize>,
    pub schedule_entries: Vec<ScheduleEntry>,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub tol: Option<f64>,
    pub trace: bool,
    pub echo: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "lattice",
    "theta",
    "phi1",
    "phi2",
    "coin_file",
    "g_phi1",
    "g_phi2",
    "coin_index",
    "site",
    "state_file",
    "steps",
    "l",
    "cycles",
    "schedule",
    "out",
    "format",
    "seed",
    "tol",
    "trace",
];

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "line {} is not a 'key = value' pair: {raw:?}",
                lineno + 1
            ));
        };
        map.insert(key.trim().to_lowercase(), value.trim().to_string());
    }
    Ok(map)
}

/// Angles accept plain floats plus the forms `pi`, `pi/4`, `3*pi/4`, `3pi/4`,
/// each optionally negated.
pub fn parse_angle(field: &str, s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (negative, rest) = match t.strip_prefix('-') {
        Some(r) => (true, r.trim()),
        None => (false, t),
    };
    let Some(idx) = rest.find("pi") else {
        return Err(format!("{field}: cannot parse angle {s:?}"));
    };
    let (num_str, tail) = rest.split_at(idx);
    let tail = &tail[2..];
    let numerator: f64 = if num_str.is_empty() {
        1.0
    } else {
        num_str
            .trim_end_matches('*')
            .trim()
            .parse()
            .map_err(|_| format!("{field}: cannot parse angle {s:?}"))?
    };
    let denominator: f64 = if tail.is_empty() {
        1.0
    } else {
        tail.strip_prefix('/')
            .ok_or_else(|| format!("{field}: cannot parse angle {s:?}"))?
            .trim()
            .parse()
            .map_err(|_| format!("{field}: cannot parse angle {s:?}"))?
    };
    let value = numerator * PI / denominator;
    Ok(if negative { -value } else { value })
}

fn parse_angle_list(field: &str, s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| parse_angle(field, p))
        .collect::<Result<_, _>>()?;
    broadcast(field, parts, n)
}

fn broadcast<T: Clone>(field: &str, values: Vec<T>, n: usize) -> Result<Vec<T>, String> {
    if values.len() == n {
        Ok(values)
    } else if values.len() == 1 {
        Ok(vec![values[0].clone(); n])
    } else {
        Err(format!(
            "{field}: expected 1 or {n} comma-separated values, found {}",
            values.len()
        ))
    }
}

fn parse_usize(field: &str, s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{field}: {s:?} is not a non-negative integer"))
}

fn parse_schedule(s: &str) -> Result<Vec<ScheduleEntry>, String> {
    let mut entries = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (step_str, kind) = match part.split_once(':') {
            None => (part, InterventionKind::AltCoinStep),
            Some((st, "alt")) => (st, InterventionKind::AltCoinStep),
            Some((_, "eigen")) => {
                return Err(
                    "schedule: eigenbasis cycles run inside spectral mode's protocol; \
                     walk schedules take alternate-coin entries (\"51\" or \"51:alt\")"
                        .into(),
                )
            }
            Some((_, other)) => {
                return Err(format!("schedule: unknown entry kind {other:?}"))
            }
        };
        entries.push(ScheduleEntry {
            step: parse_usize("schedule", step_str)?,
            kind,
        });
    }
    entries.sort_by_key(|e| e.step);
    Ok(entries)
}

pub fn build(mode: Mode, mut map: BTreeMap<String, String>) -> Result<ExperimentConfig, String> {
    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("unknown config key {key:?}"));
        }
    }
    if let Some(m) = map.get("mode") {
        if m != mode.name() {
            return Err(format!(
                "mode: config file says {m:?} but the {} subcommand was invoked",
                mode.name()
            ));
        }
    }
    map.insert("mode".into(), mode.name().into());

    let lattice_str = map
        .get("lattice")
        .ok_or("lattice: required (comma-separated power-of-two axis sizes)")?
        .clone();
    let dims: Vec<usize> = lattice_str
        .split(',')
        .map(|p| parse_usize("lattice", p))
        .collect::<Result<_, _>>()?;
    let lattice = LatticeSpec::new(dims).map_err(|e| format!("lattice: {e}"))?;
    let n = lattice.ndim();

    let coin_file = map.get("coin_file").map(PathBuf::from);
    let coin_params = if let Some(theta_str) = map.get("theta") {
        if coin_file.is_some() {
            return Err("theta: give either coin parameters or coin_file, not both".into());
        }
        let thetas = parse_angle_list("theta", theta_str, n)?;
        let phi1_default = "0".to_string();
        let phi1s = parse_angle_list("phi1", map.get("phi1").unwrap_or(&phi1_default), n)?;
        let phi2s = parse_angle_list("phi2", map.get("phi2").unwrap_or(&phi1_default), n)?;
        map.entry("phi1".into()).or_insert_with(|| "0".into());
        map.entry("phi2".into()).or_insert_with(|| "0".into());
        let params: Vec<CoinParams> = thetas
            .iter()
            .zip(&phi1s)
            .zip(&phi2s)
            .map(|((&t, &p1), &p2)| CoinParams::new(t, p1, p2))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("coin parameters: {e}"))?;
        Some(params)
    } else if coin_file.is_none() {
        return Err("theta: required unless coin_file is given".into());
    } else {
        None
    };

    let alt_phis = match (map.get("g_phi1"), map.get("g_phi2")) {
        (None, None) => None,
        (Some(a), Some(b)) => Some((
            parse_angle_list("g_phi1", a, n)?,
            parse_angle_list("g_phi2", b, n)?,
        )),
        _ => return Err("g_phi1/g_phi2: give both or neither".into()),
    };

    let state_file = map.get("state_file").map(PathBuf::from);
    if state_file.is_some() && (map.contains_key("coin_index") || map.contains_key("site")) {
        return Err("state_file: cannot combine with coin_index/site".into());
    }
    let coin_index = match map.get("coin_index") {
        Some(s) => parse_usize("coin_index", s)?,
        None => 0,
    };
    let site: Vec<i64> = match map.get("site") {
        Some(s) => {
            let coords: Vec<i64> = s
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| format!("site: {p:?} is not an integer"))
                })
                .collect::<Result<_, _>>()?;
            if coords.len() != n {
                return Err(format!("site: expected {n} coordinates, found {}", coords.len()));
            }
            coords
        }
        None => vec![0; n],
    };
    if state_file.is_none() {
        map.entry("coin_index".into())
            .or_insert_with(|| coin_index.to_string());
        map.entry("site".into()).or_insert_with(|| {
            site.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        });
    }

    let steps = map.get("steps").map(|s| parse_usize("steps", s)).transpose()?;
    let segment = map.get("l").map(|s| parse_usize("l", s)).transpose()?;
    let cycles = map.get("cycles").map(|s| parse_usize("cycles", s)).transpose()?;

    match mode {
        Mode::Walk | Mode::Scan | Mode::Crosscheck => {
            if steps.is_none() {
                return Err(format!("steps: required in {} mode", mode.name()));
            }
        }
        Mode::Revert | Mode::Spectral => {
            if segment.is_none() {
                return Err(format!("l: required in {} mode", mode.name()));
            }
        }
        Mode::Periodic => {
            if segment.is_none() || cycles.is_none() {
                return Err("l and cycles: required in periodic mode".into());
            }
        }
    }

    let schedule_entries = match map.get("schedule") {
        Some(s) => {
            if !matches!(mode, Mode::Walk | Mode::Crosscheck) {
                return Err(format!(
                    "schedule: not accepted in {} mode (it builds its own)",
                    mode.name()
                ));
            }
            parse_schedule(s)?
        }
        None => Vec::new(),
    };

    let format = match map.get("format").map(String::as_str) {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(format!("format: unknown format {other:?}")),
    };
    map.entry("format".into())
        .or_insert_with(|| format.extension().into());

    let out = match map.get("out") {
        Some(s) => PathBuf::from(s),
        None => PathBuf::from(format!("{}.{}", mode.name(), format.extension())),
    };
    map.entry("out".into())
        .or_insert_with(|| out.display().to_string());

    let seed = match map.get("seed") {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("seed: {s:?} is not an unsigned integer"))?,
        None => DEFAULT_EIGEN_SEED,
    };
    map.entry("seed".into()).or_insert_with(|| seed.to_string());

    let tol = map
        .get("tol")
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("tol: {s:?} is not a number"))
        })
        .transpose()?;

    let trace = match map.get("trace").map(String::as_str) {
        None | Some("false") | Some("0") => false,
        Some("true") | Some("1") => true,
        Some(other) => return Err(format!("trace: expected true/false, found {other:?}")),
    };
    map.entry("trace".into())
        .or_insert_with(|| trace.to_string());

    Ok(ExperimentConfig {
        mode,
        lattice,
        coin_params,
        coin_file,
        alt_phis,
        initial_basis: (coin_index, site),
        state_file,
        steps,
        segment,
        cycles,
        schedule_entries,
        out,
        format,
        seed,
        tol,
        trace,
        echo: map,
    })
}

impl ExperimentConfig {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn axis_params(&self) -> Option<&[CoinParams]> {
        self.coin_params.as_deref()
    }

    /// Whether an explicit alternate-coin parameter set was given that
    /// differs from the walk coin's phases.
    pub fn alt_phis_mismatch(&self) -> bool {
        match (&self.alt_phis, &self.coin_params) {
            (Some((g1, g2)), Some(params)) => params
                .iter()
                .zip(g1.iter().zip(g2))
                .any(|(p, (&a, &b))| p.phi1() != a || p.phi2() != b),
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// The walk coin; tensor factors are ordered so that the list entry for
    /// axis i sits on coin-index bit i.
    pub fn build_coin(&self) -> Result<CoinOperator, String> {
        if let Some(path) = &self.coin_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("coin_file: cannot read {}: {e}", path.display()))?;
            let data: CoinFileData = serde_json::from_str(&text)
                .map_err(|e| format!("coin_file: invalid JSON: {e}"))?;
            if data.dim != self.lattice.coin_dim() {
                return Err(format!(
                    "coin_file: dimension {} does not match the {}-axis lattice (needs {})",
                    data.dim,
                    self.lattice.ndim(),
                    self.lattice.coin_dim()
                ));
            }
            if data.entries.len() != data.dim * data.dim {
                return Err(format!(
                    "coin_file: expected {} entries, found {}",
                    data.dim * data.dim,
                    data.entries.len()
                ));
            }
            let entries: Vec<Complex64> = data
                .entries
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect();
            let matrix = coinwalk::ComplexMatrix::from_vec(data.dim, data.dim, entries)
                .map_err(|e| format!("coin_file: {e}"))?;
            CoinOperator::from_matrix(matrix).map_err(|e| format!("coin_file: {e}"))
        } else {
            let params = self.coin_params.as_ref().expect("validated in build");
            let factors: Vec<CoinOperator> = params
                .iter()
                .rev()
                .map(|&p| CoinOperator::from_params(p))
                .collect();
            CoinOperator::tensor(&factors).map_err(|e| format!("coin: {e}"))
        }
    }

    /// The alternate coin for scheduled intervention steps, when one can be
    /// built: explicit g_phi lists win, otherwise the matched phases of the
    /// parametric walk coin.
    pub fn build_alt(&self) -> Result<Option<CoinOperator>, String> {
        let phis: Option<(Vec<f64>, Vec<f64>)> = match &self.alt_phis {
            Some(pair) => Some(pair.clone()),
            None => self
                .coin_params
                .as_ref()
                .map(|ps| {
                    (
                        ps.iter().map(|p| p.phi1()).collect(),
                        ps.iter().map(|p| p.phi2()).collect(),
                    )
                }),
        };
        let Some((g1, g2)) = phis else {
            return Ok(None);
        };
        let factors: Vec<CoinOperator> = g1
            .iter()
            .zip(&g2)
            .rev()
            .map(|(&a, &b)| CoinOperator::intervention(a, b))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("g_phi1/g_phi2: {e}"))?;
        CoinOperator::tensor(&factors)
            .map(Some)
            .map_err(|e| format!("g_phi1/g_phi2: {e}"))
    }

    pub fn build_initial(&self) -> Result<WalkerState, String> {
        if let Some(path) = &self.state_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("state_file: cannot read {}: {e}", path.display()))?;
            let data: StateFileData = serde_json::from_str(&text)
                .map_err(|e| format!("state_file: invalid JSON: {e}"))?;
            if data.dims != self.lattice.dims() {
                return Err(format!(
                    "state_file: lattice {:?} does not match config lattice {:?}",
                    data.dims,
                    self.lattice.dims()
                ));
            }
            if data.coin_dim != self.lattice.coin_dim() {
                return Err(format!(
                    "state_file: coin dimension {} does not match lattice (needs {})",
                    data.coin_dim,
                    self.lattice.coin_dim()
                ));
            }
            let amps: Vec<Complex64> = data
                .amps
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect();
            WalkerState::from_amplitudes(self.lattice.clone(), amps)
                .map_err(|e| format!("state_file: {e}"))
        } else {
            let (coin_index, site) = &self.initial_basis;
            WalkerState::localized(self.lattice.clone(), *coin_index, site)
                .map_err(|e| format!("coin_index/site: {e}"))
        }
    }
}

pub fn load(
    mode: Mode,
    config_path: Option<&Path>,
    out: Option<&Path>,
    format: Option<&str>,
    seed: Option<u64>,
    tol: Option<f64>,
    overrides: &[String],
) -> Result<ExperimentConfig, String> {
    let mut map = match config_path {
        Some(p) => parse_config_file(p)?,
        None => BTreeMap::new(),
    };
    for pair in overrides {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(format!("--set needs KEY=VALUE, found {pair:?}"));
        };
        map.insert(key.trim().to_lowercase(), value.trim().to_string());
    }
    if let Some(p) = out {
        map.insert("out".into(), p.display().to_string());
    }
    if let Some(f) = format {
        map.insert("format".into(), f.to_string());
    }
    if let Some(s) = seed {
        map.insert("seed".into(), s.to_string());
    }
    if let Some(t) = tol {
        map.insert("tol".into(), t.to_string());
    }
    build(mode, map)
}
