use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SHORT: &str = "[sim]\nhorizon = 0.5\nwindow_start = 0.1\nwindow_end = 0.5\n";

fn sfctl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfctl")).args(args).current_dir(cwd).output().expect("spawn sfctl")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_writes_log_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", &format!("variant = fxt-m5\n{SHORT}"));
    let out = sfctl(&["run", &cfg, "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/fxt-m5.csv")).unwrap();
    assert!(csv.starts_with("# "));
    assert!(csv.lines().any(|l| l.starts_with("t,rho1,rho2,zeta1")));
    let met = fs::read_to_string(dir.path().join("res/fxt-m5.metrics")).unwrap();
    assert!(met.contains("rms_tracking_error"));
}

#[test]
fn global_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", SHORT);
    let out = sfctl(&["--dt", "5e-4", "--set", "output.name=half", "run", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/half.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains("dt = 0.0005")), "dt not echoed");
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[controller]\nm = 1.2\n");
    let out = sfctl(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m must lie in (1/2, 1)"));

    let out = sfctl(&["run", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn divergence_exits_3_with_partial_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.toml", &format!("[plant]\ninitial = 1.4, 0\n[controller]\ng_floor = 0.5\n{SHORT}"));
    let out = sfctl(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("out/fnt-m1.partial.csv").exists());
}

#[test]
fn compare_ranks_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", &format!("variant = fnt-m1\n{SHORT}"));
    let b = write(dir.path(), "b.toml", &format!("variant = fnt-m2\n{SHORT}"));
    let out = sfctl(&["compare", &a, &b], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("out/comparison.txt")).unwrap();
    assert!(table.contains("fnt-m1") && table.contains("fnt-m2"));
    assert!(dir.path().join("out/fnt-m2.metrics").exists());
}

#[test]
fn compare_rejects_mismatched_plants() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", SHORT);
    let b = write(dir.path(), "b.toml", &format!("plant = chain\n{SHORT}"));
    let out = sfctl(&["compare", &a, &b], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", SHORT);
    let out = sfctl(&["sweep", &cfg, "--param", "controller.k1", "--values", "1,2,3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("controller.k1,"));
    assert!(dir.path().join("out/fnt-m1-2.csv").exists());
}
