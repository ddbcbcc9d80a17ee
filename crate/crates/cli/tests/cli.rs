use std::path::PathBuf;
use std::process::{Command, Output};

fn swt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swt"))
        .args(args)
        .env_remove("SWT_WORKERS")
        .output()
        .expect("run swt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SUBCOMMANDS: [&str; 10] = [
    "simulate",
    "map",
    "coupling",
    "spectral",
    "oracle",
    "transience",
    "theta",
    "cutoff",
    "mixing",
    "negdep",
];

fn help_text() -> String {
    let mut all = stdout(&swt(&["--help"]));
    for sub in SUBCOMMANDS {
        all.push_str(&format!("\n===== {sub} =====\n"));
        all.push_str(&stdout(&swt(&[sub, "--help"])));
    }
    all
}

#[test]
fn help_matches_snapshot() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots/help.txt");
    let text = help_text();
    if std::env::var_os("UPDATE_SNAPSHOTS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("snapshot missing; rerun with UPDATE_SNAPSHOTS=1");
    assert_eq!(text, expected);
    for sub in SUBCOMMANDS {
        assert!(text.contains(sub));
    }
    for flag in ["--seed", "--workers", "--out", "--format", "--assert", "--experiment"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn negdep_assert_succeeds() {
    let o = swt(&["negdep", "--assert"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("live-particle,L^10 h,33,"));
    assert!(out.contains("live-particle,L^5 f,2,"));
}

#[test]
fn spectral_row() {
    let o = swt(&["spectral", "--K", "100", "--s", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[4], "t_star");
    let t_star: f64 = row[4].parse().unwrap();
    let expected = 100f64.powi(2) * 100f64.ln() / std::f64::consts::PI.powi(2);
    assert!((t_star - expected).abs() < 1e-9);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--process", "swt", "--config", "S:1,-1", "--horizon", "10", "--seed", "7"];
    let a = swt(&args);
    let b = swt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("trap-fill"));
}

#[test]
fn exit_codes() {
    assert_eq!(swt(&["bogus"]).status.code(), Some(2));
    assert_eq!(swt(&["simulate", "--config", "S:2,-1"]).status.code(), Some(2));
    assert_eq!(
        swt(&["simulate", "--process", "fep", "--config", "S:1,-1"]).status.code(),
        Some(2)
    );
    let cap = swt(&["oracle", "--seed-config", "S:1,1,1,1,1,1,1,1,-8", "--time", "1", "--max-states", "10"]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&cap.stderr).contains("10 enumerated"));
    assert_eq!(
        swt(&["transience", "--config", "S:1,-1", "--time", "1", "--samples", "20", "--max-samples", "10"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn out_file_has_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = swt(&[
        "transience",
        "--config",
        "S:1,-1",
        "--time",
        "1",
        "--samples",
        "1000",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "transience");
    assert_eq!(manifest["master_seed"], 5);
    assert!(manifest["started"].is_string());
    let first = std::fs::read_to_string(&out).unwrap();
    let again = swt(&[
        "transience", "--config", "S:1,-1", "--time", "1", "--samples", "1000", "--seed", "5", "--workers", "1",
    ]);
    // the estimate columns agree whatever the worker count
    let est = |s: &str| s.lines().nth(1).unwrap().split(',').take(8).collect::<Vec<_>>().join(",");
    assert_eq!(est(&first), est(&stdout(&again)));
}

#[test]
fn experiment_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, r#"{"target": "single-deep-trap-critical:4", "times": [1.0, 2.0], "samples": 500}"#).unwrap();
    let o = swt(&["transience", "--experiment", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3);
    assert!(out.contains("\"S:1,1,1,-3\",1.0,"));
    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(swt(&["transience", "--experiment", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn map_trajectory_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("fep.ndjson");
    let o = swt(&[
        "simulate",
        "--config",
        "F:1,1,0,1,0,0,1,0,1,1,0,0",
        "--horizon",
        "30",
        "--format",
        "json",
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let m = swt(&["map", "--direction", "fep2swt", "--input", traj.to_str().unwrap(), "--assert"]);
    assert!(m.status.success(), "{}", String::from_utf8_lossy(&m.stderr));
    let s = swt(&["map", "--direction", "fep2swt", "--input", "F:1,1,0,1,0,0,1,0"]);
    assert!(stdout(&s).contains("\"S:1,0,-1,0\""));
}

#[test]
fn coupling_assertions_pass() {
    for kind in ["labelled", "unrolled", "domination"] {
        let o = swt(&["coupling", "--kind", kind, "--config", "S:1,-7,1,1,1,1,1,1", "--seeds", "20", "--assert"]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = swt(&[
        "coupling", "--kind", "basic", "--config", "S:1,0,-1,1", "--lower", "S:1,-1,-1,1", "--seeds", "20", "--assert",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = swt(&["coupling", "--kind", "basic", "--config", "S:1,-1", "--lower", "S:1,0"]);
    assert_eq!(bad.status.code(), Some(2));
}
