use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hawking-lab")).args(args).arg("--out").arg(out).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.conf");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn geometry_writes_tables_report_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let out = lab(&["geometry"], d.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = d.path().join("geometry");
    for f in ["manifest.json", "report.json", "horizons.csv", "lambda_sweep.csv", "tortoise.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "pass");
    assert_eq!(m["config"]["geometry.lambda"], "0.04");
    assert_eq!(m["manifest_sha256"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.join("horizons.csv")).unwrap();
    assert!(csv.starts_with("r_neg,r_minus,r_plus"));
}

#[test]
fn repeated_runs_are_identical_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["spectral-selftest", "--workers", "1", "--mode-list", "0,1"], a.path()).status.code(), Some(0));
    assert_eq!(lab(&["spectral-selftest", "--workers", "3", "--mode-list", "0,1"], b.path()).status.code(), Some(0));
    for f in ["manifest.json", "report.json", "route_comparison.csv"] {
        let x = std::fs::read(a.path().join("spectral-selftest").join(f)).unwrap();
        let y = std::fs::read(b.path().join("spectral-selftest").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn superextremal_config_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    // 9 M^2 Lambda = 1.2
    let cfg = write_config(d.path(), "[geometry]\nmass = 1.0\nlambda = 0.13333333333333333\n");
    for cmd in ["selftest", "geometry"] {
        let out = lab(&[cmd, "--config", &cfg], d.path());
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("subextremal"));
    }
}

#[test]
fn bad_inputs_exit_with_one() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[geometry]\nmas = 1.0\n");
    assert_eq!(lab(&["star", "--config", &cfg], d.path()).status.code(), Some(1));
    assert_eq!(lab(&["star", "--workers", "0"], d.path()).status.code(), Some(1));
    assert_eq!(lab(&["star", "--t-sweep", "2,x"], d.path()).status.code(), Some(1));
    assert_eq!(lab(&["star", "--t-sweep", "12"], d.path()).status.code(), Some(1));
    assert_eq!(lab(&["star", "--config", "/nonexistent.conf"], d.path()).status.code(), Some(1));
}

#[test]
fn canonical_config_file_runs() {
    let d = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/canonical.conf");
    let out = lab(&["foliation", "--config", cfg], d.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS [3]"));
}
