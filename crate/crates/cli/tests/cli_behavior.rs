//! End-to-end behavior of the binary: config validation, exit codes, file
//! formats, and the documented unsupported-parameter path.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coinwalk"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).expect("config written");
}

#[test]
fn walk_zero_steps_is_a_delta_at_the_initial_site() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\ncoin_index = 1\nsite = 3\nsteps = 0\nout = walk.csv\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "walk.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("walk.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p"));
    for line in lines {
        let (x, p) = line.split_once(',').unwrap();
        if x == "3" {
            assert_eq!(p, "1");
        } else {
            assert_eq!(p, "0");
        }
    }
    assert!(dir.path().join("walk.manifest.json").exists());
}

#[test]
fn missing_required_key_exits_two() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.cfg", "mode = walk\nlattice = 16\ntheta = pi/4\n");
    let out = run_in(dir.path(), &["walk", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("steps"), "stderr: {stderr}");
}

#[test]
fn malformed_value_exits_two_with_field_name() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "bad.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\nsteps = many\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
}

#[test]
fn unknown_key_exits_two() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "bad.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\nsteps = 4\nstepz = 9\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stepz"));
}

#[test]
fn mode_mismatch_exits_two() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\nsteps = 4\n",
    );
    let out = run_in(dir.path(), &["revert", "--config", "walk.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_power_of_two_lattice_exits_two() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "bad.cfg",
        "mode = walk\nlattice = 100\ntheta = pi/4\nsteps = 4\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eigen_schedule_entries_are_rejected_in_walk_mode() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "bad.cfg",
        "mode = walk\nlattice = 32\ntheta = pi/4\nsteps = 8\nschedule = 3:eigen\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectral"));
}

#[test]
fn revert_smallest_segment_returns_exactly() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "revert.cfg",
        "mode = revert\nlattice = 16\ntheta = pi/4\ncoin_index = 1\nl = 1\nout = r.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["revert", "--config", "revert.cfg", "--tol", "1e-12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let p = doc["manifest"]["metrics"]["position_return_probability"]
        .as_f64()
        .unwrap();
    assert!((p - 1.0).abs() <= 1e-12);
    assert!(doc["data"].as_array().unwrap().len() == 16);
}

#[test]
fn mismatched_intervention_phases_warn_but_succeed() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "revert.cfg",
        "mode = revert\nlattice = 64\ntheta = pi/4\nphi1 = 0\nphi2 = 0\n\
         g_phi1 = 0.9\ng_phi2 = 1.3\ncoin_index = 1\nl = 6\nout = r.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["revert", "--config", "revert.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let warnings = doc["manifest"]["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    let dd = doc["manifest"]["metrics"]["dd_defect"].as_f64().unwrap();
    assert!(dd > 1e-3, "composite should not square to identity, got {dd}");
    assert!(doc["manifest"]["metrics"]
        .get("dual_path_defect")
        .is_none());
}

#[test]
fn periodic_single_cycle_reports_no_periods() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "per.cfg",
        "mode = periodic\nlattice = 32\ntheta = pi/4\ncoin_index = 1\nl = 1\ncycles = 1\nout = p.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["periodic", "--config", "per.cfg"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert!(doc["manifest"]["metrics"]["position_period"].is_null());
    assert!(doc["manifest"]["metrics"]["full_state_period"].is_null());
}

#[test]
fn periodic_reports_both_periods() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "per.cfg",
        "mode = periodic\nlattice = 32\ntheta = pi/4\ncoin_index = 1\nl = 1\ncycles = 4\nout = p.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["periodic", "--config", "per.cfg"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(doc["manifest"]["metrics"]["position_period"], 2);
    assert_eq!(doc["manifest"]["metrics"]["full_state_period"], 4);
}

#[test]
fn spectral_grover_coin_exits_four_and_names_the_momentum() {
    let dir = TempDir::new().unwrap();
    let mut entries = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let v = if i == j { 2.0 / 4.0 - 1.0 } else { 2.0 / 4.0 };
            entries.push(serde_json::json!({"re": v, "im": 0.0}));
        }
    }
    fs::write(
        dir.path().join("grover.json"),
        serde_json::json!({"dim": 4, "entries": entries}).to_string(),
    )
    .unwrap();
    write(
        dir.path(),
        "spectral.cfg",
        "mode = spectral\nlattice = 8,8\ncoin_file = grover.json\nl = 2\nout = s.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["spectral", "--config", "spectral.cfg"]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("momentum"), "stderr: {stderr}");
}

#[test]
fn crosscheck_zero_steps_is_exact() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "cc.cfg",
        "mode = crosscheck\nlattice = 32\ntheta = pi/4\ncoin_index = 1\nsteps = 0\nout = cc.json\nformat = json\n",
    );
    let out = run_in(dir.path(), &["crosscheck", "--config", "cc.cfg"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cc.json")).unwrap()).unwrap();
    let diff = doc["manifest"]["metrics"]["max_amplitude_difference"]
        .as_f64()
        .unwrap();
    assert!(diff <= 1e-14);
}

#[test]
fn crosscheck_impossible_tolerance_exits_three() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "cc.cfg",
        "mode = crosscheck\nlattice = 64\ntheta = pi/4\ncoin_index = 1\nsteps = 32\nout = cc.csv\n",
    );
    let out = run_in(
        dir.path(),
        &["crosscheck", "--config", "cc.cfg", "--tol", "1e-30"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn state_file_round_trips_through_walk() {
    let dir = TempDir::new().unwrap();
    let mut amps = vec![serde_json::json!({"re": 0.0, "im": 0.0}); 2 * 16];
    amps[16 + 2] = serde_json::json!({"re": 0.0, "im": 1.0}); // i |1⟩_c |2⟩_x
    fs::write(
        dir.path().join("state.json"),
        serde_json::json!({"coin_dim": 2, "dims": [16], "amps": amps}).to_string(),
    )
    .unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\nstate_file = state.json\nsteps = 0\nout = w.csv\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "walk.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    for line in text.lines().skip(1) {
        let (x, p) = line.split_once(',').unwrap();
        if x == "2" {
            assert_eq!(p, "1");
        } else {
            assert_eq!(p, "0");
        }
    }
}

#[test]
fn scan_csv_has_the_documented_header() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "scan.cfg",
        "mode = scan\nlattice = 32\ntheta = pi/4\ncoin_index = 1\nsteps = 8\nout = scan.csv\n",
    );
    let out = run_in(dir.path(), &["scan", "--config", "scan.cfg"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("j,peak_x,peak_p,neg_mass"));
    // baseline row plus one per candidate step
    assert_eq!(text.lines().count(), 1 + 9);
}

#[test]
fn trace_file_is_written_when_requested() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\ncoin_index = 1\nsteps = 3\ntrace = true\nout = w.csv\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "walk.cfg"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("w.trace.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("step,x,p"));
    // steps 0..=3, 16 sites each
    assert_eq!(text.lines().count(), 1 + 4 * 16);
}

#[test]
fn set_overrides_win_over_the_file() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 16\ntheta = pi/4\ncoin_index = 0\nsteps = 0\nout = w.csv\n",
    );
    let out = run_in(
        dir.path(),
        &["walk", "--config", "walk.cfg", "--set", "site=5"],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert!(text.lines().any(|l| l == "5,1"));
}

#[test]
fn two_dimensional_output_has_two_axis_columns() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "walk.cfg",
        "mode = walk\nlattice = 8,8\ntheta = 0.93,0.54\nphi1 = 0.41,0.77\nphi2 = 0.17,0.29\n\
         coin_index = 2\nsite = 0,0\nsteps = 3\nout = w.csv\n",
    );
    let out = run_in(dir.path(), &["walk", "--config", "walk.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,p"));
    assert_eq!(text.lines().count(), 1 + 64);
}
