//! Data writers. CSV files carry one row per lattice site (row-major over
//! axes, signed coordinates ascending, origin centered); JSON output is a
//! single object holding the manifest and the same rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use coinwalk::reversion::ScanEntry;
use coinwalk::LatticeSpec;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::manifest::Manifest;
use crate::runner::RunError;

pub fn axis_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "x".to_string(),
            1 => "y".to_string(),
            2 => "z".to_string(),
            other => format!("x{other}"),
        })
        .collect()
}

/// Sites in output order: signed coordinates ascending, row-major over axes.
pub fn signed_sites(lattice: &LatticeSpec) -> Vec<(Vec<i64>, usize)> {
    let dims = lattice.dims().to_vec();
    let helper = LatticeSpec::new(dims.clone()).expect("same dims");
    (0..lattice.n_sites())
        .map(|flat| {
            let counters = helper.unflatten(flat);
            let signed: Vec<i64> = counters
                .iter()
                .zip(&dims)
                .map(|(&c, &n)| c as i64 - (n / 2) as i64)
                .collect();
            let site = helper.site_from_signed(&signed).expect("in range");
            (signed, site)
        })
        .collect()
}

pub fn distribution_rows(lattice: &LatticeSpec, dist: &[f64]) -> Vec<Value> {
    let names = axis_names(lattice.ndim());
    signed_sites(lattice)
        .into_iter()
        .map(|(signed, site)| {
            let mut row = serde_json::Map::new();
            for (name, coord) in names.iter().zip(&signed) {
                row.insert(name.clone(), json!(coord));
            }
            row.insert("p".into(), json!(dist[site]));
            Value::Object(row)
        })
        .collect()
}

fn write_csv_header(w: &mut impl Write, lattice: &LatticeSpec, extra: &[&str]) -> std::io::Result<()> {
    let mut cols: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    cols.extend(axis_names(lattice.ndim()));
    cols.push("p".into());
    writeln!(w, "{}", cols.join(","))
}

pub fn write_distribution_csv(
    path: &Path,
    lattice: &LatticeSpec,
    dist: &[f64],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv_header(&mut w, lattice, &[])?;
    for (signed, site) in signed_sites(lattice) {
        let coords: Vec<String> = signed.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{},{}", coords.join(","), dist[site])?;
    }
    w.flush()
}

pub fn write_trace_csv(
    path: &Path,
    lattice: &LatticeSpec,
    trace: &[Vec<f64>],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv_header(&mut w, lattice, &["step"])?;
    let sites = signed_sites(lattice);
    for (step, dist) in trace.iter().enumerate() {
        for (signed, site) in &sites {
            let coords: Vec<String> = signed.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{},{}", step, coords.join(","), dist[*site])?;
        }
    }
    w.flush()
}

pub fn trace_rows(lattice: &LatticeSpec, trace: &[Vec<f64>]) -> Vec<Value> {
    let names = axis_names(lattice.ndim());
    let sites = signed_sites(lattice);
    let mut rows = Vec::with_capacity(trace.len() * sites.len());
    for (step, dist) in trace.iter().enumerate() {
        for (signed, site) in &sites {
            let mut row = serde_json::Map::new();
            row.insert("step".into(), json!(step));
            for (name, coord) in names.iter().zip(signed) {
                row.insert(name.clone(), json!(coord));
            }
            row.insert("p".into(), json!(dist[*site]));
            rows.push(Value::Object(row));
        }
    }
    rows
}

pub fn write_scan_csv(path: &Path, entries: &[ScanEntry]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "j,peak_x,peak_p,neg_mass")?;
    for e in entries {
        writeln!(
            w,
            "{},{},{},{}",
            e.intervention_step.unwrap_or(0),
            e.peak_site,
            e.peak_probability,
            e.negative_mass
        )?;
    }
    w.flush()
}

pub fn scan_rows(entries: &[ScanEntry]) -> Vec<Value> {
    entries
        .iter()
        .map(|e| {
            json!({
                "j": e.intervention_step.unwrap_or(0),
                "peak_x": e.peak_site,
                "peak_p": e.peak_probability,
                "neg_mass": e.negative_mass,
            })
        })
        .collect()
}

pub fn manifest_sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Write the data product plus its manifest. CSV output gets a sidecar
/// manifest file; JSON embeds both in one object.
pub fn write_output(
    cfg: &ExperimentConfig,
    manifest: &Manifest,
    csv_writer: impl FnOnce(&Path) -> std::io::Result<()>,
    data: Value,
) -> Result<Vec<PathBuf>, RunError> {
    let mut written = Vec::new();
    match cfg.format {
        OutputFormat::Csv => {
            csv_writer(&cfg.out).map_err(RunError::from_io)?;
            written.push(cfg.out.clone());
            let sidecar = manifest_sidecar_path(&cfg.out);
            let text = serde_json::to_string_pretty(&manifest.to_json())
                .expect("manifest serializes");
            std::fs::write(&sidecar, text + "\n").map_err(RunError::from_io)?;
            written.push(sidecar);
        }
        OutputFormat::Json => {
            let object = json!({
                "manifest": manifest.to_json(),
                "data": data,
            });
            let text = serde_json::to_string_pretty(&object).expect("output serializes");
            std::fs::write(&cfg.out, text + "\n").map_err(RunError::from_io)?;
            written.push(cfg.out.clone());
        }
    }
    Ok(written)
}
