use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sphinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphinv"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn gamma_writes_table_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let o = sphinv(&["gamma", "--set", "cyclic:d=3", "--kmax", "4", "--exact", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("gamma.csv")).unwrap();
    let mut rows = csv.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "exact").unwrap();
    let k2: Vec<&str> = rows.nth(2).unwrap().split(',').collect();
    assert_eq!(k2[0], "2");
    // C3 at k = 2: (1 − 1/5 − 1/5)/3
    assert!((k2[col].parse::<f64>().unwrap() - 0.2).abs() < 1e-15);
    let m = manifest(&out);
    assert_eq!(m["command"], "gamma");
    assert_eq!(m["summary"]["is_group"], true);
    assert_eq!(m["outputs"][0], "gamma.csv");
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# gamma run\nset = symmetric:d=4\nkmax = 3\nexact = true\nformat = json\n").unwrap();
    let out = tmp.path().join("c");
    let o = sphinv(&["--config", cfg.to_str().unwrap(), "gamma", "--kmax", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["config"]["kmax"], 5);
    assert_eq!(m["config"]["set"], "symmetric:d=4");
    assert!(out.join("gamma.json").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let bad_set = sphinv(&["gamma", "--set", "cyclic:d=0", "--exact", "--out", out]);
    assert_eq!(bad_set.status.code(), Some(2));
    let bad_kernel = sphinv(&["mercer-check", "--kernel", "nope", "--out", out]);
    assert_eq!(bad_kernel.status.code(), Some(2));
    let missing_cfg = sphinv(&["--config", "/nonexistent/x.conf", "gamma", "--set", "cyclic:d=3", "--out", out]);
    assert_eq!(missing_cfg.status.code(), Some(2));
    let budget = sphinv(&[
        "krr-curve", "--d", "6", "--set", "symmetric:d=6", "--n-grid", "1000", "--seeds", "0", "--max-evaluations",
        "1000", "--out", out,
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"));
    let usage = sphinv(&["gamma", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(sphinv(&["--help"]).status.success());
}

#[test]
fn rerun_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let o = sphinv(&[
        "--threads", "2", "krr-curve", "--d", "4", "--set", "cyclic:d=4", "--target-set", "cyclic:d=4", "--n-grid",
        "40", "--seeds", "3", "--n-test", "50", "--out", a.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = a.join("manifest.json");
    let o = sphinv(&["--threads", "1", "rerun", m.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["curve.csv", "runs.csv"] {
        assert_eq!(fs::read_to_string(a.join(f)).unwrap(), fs::read_to_string(b.join(f)).unwrap());
    }
    assert_eq!(manifest(&a)["seeds"], manifest(&b)["seeds"]);
    assert_eq!(manifest(&b)["threads"], 1);
}

#[test]
fn rates_single_point_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    let o = sphinv(&["rates", "--set", "cyclic:d=8", "--n-grid", "1e4", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Value = serde_json::from_str(&fs::read_to_string(out.join("rates.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert!(rows[0]["gain"].as_f64().unwrap() >= 1.0);
}
