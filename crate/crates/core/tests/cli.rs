use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkdv-imethod")).args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn plan_prints_the_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["plan-gwp", "--s", "0.5", "--T", "100", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let plan: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["N"], 22);
    assert_eq!(plan["steps"], 10648);
    assert_eq!(plan["feasible"], true);
    for key in ["s", "T", "theta", "c_margin", "exponent", "lambda"] {
        assert!(plan.get(key).is_some(), "missing {key}");
    }
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["subcommand"], "plan-gwp");
    assert_eq!(manifest["seed"], 0);
    assert_eq!(manifest["config"]["imethod.s"], "0.5");
    assert!(manifest["constants"]["c4"].is_number());
    assert!(manifest["wall_time_seconds"].is_number());
}

#[test]
fn boundary_regularity_is_infeasible_but_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["plan-gwp", "--s", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let plan: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["feasible"], false);
    assert!(plan["N"].is_null());
}

#[test]
fn identity_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-identity", "--samples", "1000000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("verification.json"));
    assert_eq!(v["pass"], true);
    assert_eq!(json(&dir.path().join("manifest.json"))["seed"], 7);
}

#[test]
fn unknown_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--equation", "mkdv", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = run(dir.path(), &["transmogrify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--equation", "kdv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["drift-sweep", "--N-list", "4, 100"]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = dir.path().join("broken.ini");
    fs::write(&cfg, "[grid]\nK 64\n").unwrap();
    let out = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-dmvt", "--profile", "sharp", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&dir.path().join("verification.json"));
    assert_eq!(v["pass"], false);
    assert_eq!(json(&dir.path().join("manifest.json"))["pass"], false);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plan.ini");
    fs::write(&cfg, "[imethod]\ns = 0.75\n\n[experiment]\nT = 1000\nc = 2\n").unwrap();
    let out = run(dir.path(), &["plan-gwp", "--config", cfg.to_str().unwrap(), "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let plan: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["s"], 0.75);
    assert_eq!(plan["T"], 1000.0);
    assert_eq!(plan["c_margin"], 1.0);
}

#[test]
fn the_resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let again = dir.path().join("again");
    let out = run(&first, &["invariants", "--equation", "system", "--t-end", "0.1", "--K", "128", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let ini = first.join("run.ini");
    let out = run(&again, &["invariants", "--config", ini.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["invariants.csv", "verification.json", "run.ini"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(again.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(first.join("invariants.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,mass,energy,i1,i2"));
}

#[test]
fn simulate_writes_a_loadable_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--t-end", "0.05", "--dt", "1e-3", "--snapshot-every", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, traj) =
        mkdv_imethod::solver::load_trajectory::<mkdv_imethod::spectral::Field>(&dir.path().join("trajectory")).unwrap();
    assert_eq!(traj.len(), 3);
    let manifest = json(&dir.path().join("manifest.json"));
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|o| o == "invariants.csv"));
}
