//! End-to-end behaviour of the `stickslip` binary: exit codes, output
//! files and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str], config: &Path, out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stickslip"));
    cmd.args(args).arg("--config").arg(config).arg("--out").arg(out);
    cmd.env_remove("STICKSLIP_THREADS");
    if let Some(n) = threads {
        cmd.env("STICKSLIP_THREADS", n);
    }
    cmd.output().unwrap()
}

fn config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn kv(path: &Path) -> Vec<(String, String)> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .map(|r| (r[0].to_string(), r[1].to_string()))
        .collect()
}

fn lookup(rows: &[(String, String)], key: &str) -> String {
    rows.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing {key}")).1.clone()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "{}");
    let out = dir.path();
    assert_eq!(run(&["roots"], &cfg, out, None).status.code(), Some(0));
    // Inside the unstable zone: precondition rejected.
    assert_eq!(run(&["certify", "--which", "basin", "--vref", "1"], &cfg, out, None).status.code(), Some(4));
    // Outside the zone but below the certifiable threshold.
    assert_eq!(run(&["certify", "--which", "gas", "--vref", "3"], &cfg, out, None).status.code(), Some(3));
    assert_eq!(run(&["certify"], &cfg, out, None).status.code(), Some(2));
    assert_eq!(run(&["roots", "--vref", "-1"], &cfg, out, None).status.code(), Some(2));
    assert_eq!(run(&["roots"], &cfg, out, Some("zero")).status.code(), Some(2));

    let bad = config(dir.path(), r#"{"mass": 1.0}"#);
    assert_eq!(run(&["roots"], &bad, out, None).status.code(), Some(2));
    let invalid = config(dir.path(), r#"{"k": -1.0}"#);
    assert_eq!(run(&["roots"], &invalid, out, None).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["roots"], &missing, out, None).status.code(), Some(2));
}

#[test]
fn certify_writes_a_replayable_ellipse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"v_ref": 10.0}"#);
    let out = run(&["certify", "--which", "gas"], &cfg, dir.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let cert = kv(&dir.path().join("certificate_gas.csv"));
    assert_eq!(lookup(&cert, "verified"), "true");
    assert_eq!(lookup(&cert, "inclusion_replay_failures"), "0");
    let matrix = |prefix: &str| -> [f64; 3] {
        ["p11", "p12", "p22"].map(|k| lookup(&cert, &format!("{prefix}{k}")).parse().unwrap())
    };
    let (p_g, p_l) = (matrix("attractor_"), matrix("basin_"));
    let quad = |p: [f64; 3], x: f64, y: f64| p[0] * x * x + 2.0 * p[1] * x * y + p[2] * y * y;

    let mut reader = csv::Reader::from_path(dir.path().join("ellipse_gas.csv")).unwrap();
    let mut counts = (0, 0);
    for rec in reader.records() {
        let rec = rec.unwrap();
        let (x, y): (f64, f64) = (rec[1].parse().unwrap(), rec[2].parse().unwrap());
        match &rec[0] {
            "attractor" => {
                counts.0 += 1;
                assert!((quad(p_g, x, y) - 1.0).abs() < 1e-9);
                assert!(quad(p_l, x, y) <= 1.0 + 1e-9, "attractor point outside the basin");
            }
            "basin" => {
                counts.1 += 1;
                assert!((quad(p_l, x, y) - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected set {other}"),
        }
    }
    assert!(counts.0 > 0 && counts.1 > 0);
}

#[test]
fn simulate_reports_the_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"v_ref": 1.0, "v0": 6.0, "z0": 0.0}"#);
    for _ in 0..2 {
        assert!(run(&["simulate"], &cfg, dir.path(), None).status.success());
    }
    let mut reader = csv::Reader::from_path(dir.path().join("cycle_report.csv")).unwrap();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2, "report rows are appended");
    assert_eq!(rows[0], rows[1]);
    assert_eq!(&rows[0][5], "cycle");
    let period: f64 = rows[0][7].parse().unwrap();
    assert!((period - 5.0).abs() <= 0.5);

    let mut traj = csv::Reader::from_path(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.headers().unwrap(), vec!["t", "v", "z", "mode"]);
    assert_eq!(traj.records().count(), 40_001);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"sweep": [0.07, 0.5, 1.0]}"#);
    let (a, b) = (dir.path().join("one"), dir.path().join("two"));
    assert!(run(&["sweep"], &cfg, &a, Some("1")).status.success());
    assert!(run(&["sweep"], &cfg, &b, Some("2")).status.success());
    let read = |d: &Path| std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let text = read(&a);
    assert!(text.contains("basin-only"));
    assert!(text.contains("unstable-equilibrium"));
    assert!(!text.contains("gas-threshold"), "no grid speed lies above the unstable zone");
}
