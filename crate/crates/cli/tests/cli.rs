use std::path::Path;
use std::process::{Command, Output};

fn uavcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavcast")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("in.toml");
    std::fs::write(&scen, "[gts]\npoints = [[0.0, 0.0], [1200.0, 300.0], [400.0, 900.0]]\n").unwrap();
    let plan = dir.path().join("plan");
    let out = uavcast(&["plan", "-c", s(&scen), "-o", s(&plan), "--scheme", "vbs-as-waypoints"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("requirement met     true"), "{summary}");
    for f in ["scenario.toml", "trajectory.csv", "schedule.csv", "waypoints.csv", "speed.csv", "coverage.csv"] {
        assert!(plan.join(f).exists(), "{f}");
    }
    assert!(!plan.join("trajectory.svg").exists());

    let sim = dir.path().join("sim");
    let out = uavcast(&[
        "simulate",
        "-c",
        s(&plan.join("scenario.toml")),
        "--schedule",
        s(&plan.join("schedule.csv")),
        "--trials",
        "500",
        "-o",
        s(&sim),
        "--svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(sim.join("recovery.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(sim.join("recovery.svg").exists());
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavcast(&["plan", "-c", "/nonexistent.toml", "-o", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));

    let out = uavcast(&["compare", "-o", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));

    let out = uavcast(&["sweep-d", "--seed", "1", "--grid", "100,-5", "-o", s(dir.path())]);
    assert!(!out.status.success());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[gts]\npoints = [[0.0, 0.0]]\n[channel]\nbogus = 1\n").unwrap();
    let out = uavcast(&["plan", "-c", s(&bad), "-o", s(dir.path())]);
    assert!(!out.status.success());
}

#[test]
fn sweep_reports_critical_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavcast(&[
        "sweep-d",
        "--seed",
        "2",
        "--n-gts",
        "6",
        "--area-side",
        "1000",
        "--grid",
        "300,450",
        "--schemes",
        "vbs-as-waypoints,optimized-waypoints",
        "-o",
        s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("D* = 439."), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
}
