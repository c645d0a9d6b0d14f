use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tunnelopt_cli::config::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tunnelopt"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Writes `config` to a fresh directory, runs `command` there and returns
/// the exit code and the directory.
fn run(command: &str, config: &str, extra: &[&str]) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("config.json");
    std::fs::write(&file, config).unwrap();
    let status = bin()
        .args([command, "--config", file.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .args(extra)
        .status()
        .unwrap();
    (status.code().unwrap(), dir)
}

fn summary(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn table(dir: &Path, name: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn quadratic_mass_gives_quarter() {
    let (code, dir) = run("schedule", r#"{"path": {"kind": "synthetic_mass", "profile": "quadratic"}}"#, &[]);
    assert_eq!(code, 0);
    let s = summary(dir.path(), "schedule.json");
    assert!((s["tau"].as_f64().unwrap() - 0.25).abs() < 1e-8);
    assert_eq!(s["config"]["path"]["profile"], "quadratic");
}

#[test]
fn constant_mass_schedule_is_identity() {
    let (code, dir) = run("schedule", r#"{"path": {"kind": "synthetic_mass", "profile": "constant"}}"#, &[]);
    assert_eq!(code, 0);
    let (header, rows) = table(dir.path(), "schedule.csv");
    assert_eq!(header, ["q", "M", "s_of_q"]);
    assert!(rows.len() > 2);
    assert!(rows.iter().all(|r| r[1] == 1.0 && (r[2] - r[0]).abs() < 1e-12));
}

#[test]
fn grover_schedule_is_finite() {
    let (code, dir) = run("schedule", &std::fs::read_to_string(configs().join("schedule_grover.json")).unwrap(), &[]);
    assert_eq!(code, 0);
    assert!(summary(dir.path(), "schedule.json")["tau"].as_f64().unwrap() > 0.0);
    let (_, rows) = table(dir.path(), "schedule.csv");
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
}

#[test]
fn constant_path_does_not_tunnel() {
    let cfg = r#"{"path": {"kind": "constant", "field": [0.3, 0.1, 1.0]},
                  "dephasing": {"mode": "scalar", "gamma": 1.0}, "epsilon": 0.05}"#;
    let (code, dir) = run("evolve", cfg, &[]);
    assert_eq!(code, 0);
    let (header, rows) = table(dir.path(), "evolve.csv");
    assert_eq!(header, ["s", "q", "T", "trace_error", "min_eig"]);
    assert!(rows.iter().all(|r| r[2].abs() < 1e-12 && r[3] < 1e-9 && r[4] >= -1e-7));
}

#[test]
fn rotating_path_matches_prediction_and_optimum_wins() {
    let cfg = |sched: &str| {
        format!(
            r#"{{"path": {{"kind": "quarter_circle", "gap": 1.0}}, "dephasing": {{"mode": "scalar", "gamma": 1.0}},
                "schedule": {{"kind": "{sched}"}}, "epsilon": 0.01}}"#
        )
    };
    let (code, opt) = run("evolve", &cfg("optimal"), &[]);
    assert_eq!(code, 0);
    let o = summary(opt.path(), "evolve.json");
    let (t, p) = (o["T_final"].as_f64().unwrap(), o["predicted"].as_f64().unwrap());
    assert!((t - p).abs() <= 5.0 * 0.01 * 0.01, "{t} vs {p}");
    assert!((p - 2.0 * 0.01 * o["tau"].as_f64().unwrap()).abs() < 1e-9);
    let (code, uni) = run("evolve", &cfg("uniform"), &[]);
    assert_eq!(code, 0);
    assert!(summary(uni.path(), "evolve.json")["T_final"].as_f64().unwrap() > t);
}

#[test]
fn zero_tunneling_control() {
    for offset in [0.0, 0.1] {
        let cfg = format!(r#"{{"path": {{"kind": "quarter_circle", "gap": 1.0}}, "epsilon": 0.05, "offset": {offset}}}"#);
        let (code, dir) = run("zerotunnel", &cfg, &[]);
        assert_eq!(code, 0);
        let s = summary(dir.path(), "zerotunnel.json");
        assert!((s["final_fidelity"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
        assert!(s["deviation_actual"].as_f64().unwrap() <= s["deviation_bound"].as_f64().unwrap());
        let (header, rows) = table(dir.path(), "zerotunnel.csv");
        assert_eq!(header, ["i", "q_star", "axis_x", "axis_y", "axis_z", "angle", "duration"]);
        assert_eq!(rows.len() as u64, s["rotations"].as_u64().unwrap());
        assert!(rows.iter().all(|r| r[6] <= 2.0 * std::f64::consts::PI + 1e-12));
    }
}

#[test]
fn grover_scaling_slope() {
    let cfg = r#"{"grover": {"n_list": [64, 256, 1024, 4096, 16384], "rule": {"kind": "fixed", "gamma": 1.0}}}"#;
    let (code, dir) = run("grover", cfg, &["--threads", "2"]);
    assert_eq!(code, 0);
    let s = summary(dir.path(), "grover.json");
    assert!(s["slope"].as_f64().unwrap().abs() <= 0.05);
    assert_eq!(s["fit_window"], serde_json::json!([1024, 4096, 16384]));
    let (header, rows) = table(dir.path(), "grover.csv");
    assert_eq!(header, ["N", "gamma", "tau"]);
    assert_eq!(rows.len(), 5);
}

#[test]
fn exit_codes() {
    let (code, _) = run("evolve", r#"{"path": {"kind": "chord"}, "epsilon": -1}"#, &[]);
    assert_eq!(code, 2);
    let (code, _) = run("evolve", r#"{"path": {"kind": "chord"}}"#, &[]);
    assert_eq!(code, 2, "missing epsilon");
    let (code, _) = run("zerotunnel", r#"{"path": {"kind": "chord"}, "epsilon": 0.01, "dephasing": {"mode": "scalar", "gamma": 1}}"#, &[]);
    assert_eq!(code, 2);
    let (code, _) = run("evolve", r#"{"path": {"kind": "random_linear", "dim": 2}, "epsilon": 0.1}"#, &[]);
    assert_eq!(code, 2, "random fixture without a seed");
    let (code, _) = run("evolve", r#"{"path": {"kind": "random_linear", "dim": 2}, "epsilon": 0.1}"#, &["--seed", "3"]);
    assert_eq!(code, 0);
    let cfg = r#"{"path": {"kind": "chord"}, "dephasing": {"mode": "scalar", "gamma": 1}, "epsilon": 0.01,
                  "integrator": {"max_steps": 50}}"#;
    let (code, _) = run("evolve", cfg, &[]);
    assert_eq!(code, 3, "step limit is a numerical failure");
    let status = bin().args(["schedule", "--config", "/nonexistent/config.json"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn seed_flag_is_recorded() {
    let (code, dir) = run("evolve", r#"{"path": {"kind": "random_linear", "dim": 2}, "epsilon": 0.1, "seed": 1}"#, &["--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(summary(dir.path(), "evolve.json")["config"]["seed"], 9);
}

#[test]
fn shipped_configs_parse_and_schema_is_current() {
    let out = bin().arg("schema").output().unwrap();
    assert!(out.status.success());
    let fresh: Value = serde_json::from_slice(&out.stdout).unwrap();
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(configs().join("schema.json")).unwrap()).unwrap();
    assert_eq!(fresh, shipped, "regenerate configs/schema.json with `tunnelopt schema`");
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        if p.file_name().unwrap() == "schema.json" {
            continue;
        }
        assert!(ExperimentConfig::load(&p).is_ok(), "{}", p.display());
    }
}
