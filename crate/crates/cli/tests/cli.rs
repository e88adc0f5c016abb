use std::path::Path;
use std::process::{Command, Output};

fn dcpsp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcpsp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, seed: &str) {
    let o = dcpsp(
        dir,
        &["generate", "--seed", seed, "--locations", "4", "--horizon", "2", "--remote-replaces-cloudlet", "--out", "s.json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_solve_validate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "7");
    for solver in ["exact", "heu1", "heu2"] {
        let o = dcpsp(dir.path(), &["solve", "--scenario", "s.json", "--solver", solver, "--out", "sol.json"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = dcpsp(dir.path(), &["validate", "--scenario", "s.json", "--solution", "sol.json"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok total="));
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "11");
    let a = std::fs::read(dir.path().join("s.json")).unwrap();
    generate(dir.path(), "11");
    assert_eq!(a, std::fs::read(dir.path().join("s.json")).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dcpsp(dir.path(), &["solve", "--solver", "nope"]).status.code(), Some(1));
    assert_eq!(dcpsp(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        dcpsp(dir.path(), &["solve", "--scenario", "missing.json", "--solver", "heu1"]).status.code(),
        Some(1)
    );
    assert_eq!(dcpsp(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn tampered_solution_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3");
    let o = dcpsp(dir.path(), &["solve", "--scenario", "s.json", "--solver", "heu1", "--out", "sol.json"]);
    assert!(o.status.success());
    // Drop all penalty units: demand conservation breaks wherever there was any.
    let path = dir.path().join("sol.json");
    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let pen = doc["y_pen"].as_array_mut().unwrap();
    let mut touched = false;
    for per_u in pen.iter_mut() {
        for per_s in per_u.as_array_mut().unwrap() {
            for v in per_s.as_array_mut().unwrap() {
                touched |= v.as_u64() != Some(0);
                *v = 0.into();
            }
        }
    }
    assert!(touched, "scenario should leave some demand unserved");
    std::fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
    let o = dcpsp(dir.path(), &["validate", "--scenario", "s.json", "--solution", "sol.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_mps_writes_sections() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "5");
    let o = dcpsp(dir.path(), &["export-mps", "--scenario", "s.json", "--out", "m.mps"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("m.mps")).unwrap();
    assert!(text.contains("\nROWS\n") && text.ends_with("ENDATA\n"));
}

#[test]
fn bench_writes_four_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"axis":"time-slots","values":[1,2],"params":{"n_locations":3},"seeds":[1,2],
            "solvers":["exact","heu1"],"time_budget_secs":20,"record_wall_time":false}"#,
    )
    .unwrap();
    let o = dcpsp(dir.path(), &["bench", "--config", "cfg.json", "--out-dir", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in ["results.csv", "summary.csv", "runtime.svg", "cost_ratio.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    let first = std::fs::read(out.join("results.csv")).unwrap();
    let o = dcpsp(dir.path(), &["bench", "--config", "cfg.json", "--out-dir", "out"]);
    assert!(o.status.success());
    assert_eq!(first, std::fs::read(out.join("results.csv")).unwrap());
}

#[test]
fn bench_rejects_unsorted_axis() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"axis":"locations","values":[4,3],"seeds":[1],"solvers":["heu1"]}"#,
    )
    .unwrap();
    let o = dcpsp(dir.path(), &["bench", "--config", "cfg.json", "--out-dir", "out"]);
    assert_eq!(o.status.code(), Some(1));
}
