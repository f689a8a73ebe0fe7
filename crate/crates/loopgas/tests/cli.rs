//! End-to-end tests for the command-line binary: exit codes, report files,
//! and determinism of the emitted JSON.

use std::process::{Command, Output};

fn loopgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopgas"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn unknown_experiment_is_refused_with_exit_code_two() {
    let out = loopgas(&["not-an-experiment", "--topology", "torus", "--lx", "2", "--ly", "2"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("degeneracy"),
        "the refusal should list the valid experiment names: {}",
        stderr(&out)
    );
}

#[test]
fn missing_required_flags_exit_with_code_two() {
    let out = loopgas(&["degeneracy", "--topology", "torus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refused_lattices_exit_with_code_two() {
    // Braiding needs room for a loop that encircles exactly one endpoint.
    let out = loopgas(&["braiding", "--topology", "torus", "--lx", "2", "--ly", "2"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    // The iterative solver refuses basis sizes beyond its documented cap.
    let out = loopgas(&["degeneracy", "--topology", "torus", "--lx", "4", "--ly", "4"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    // Experiments that require a torus refuse other topologies.
    let out = loopgas(&["braiding", "--topology", "sphere", "--lx", "4", "--ly", "4"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_sector_string_exits_with_code_two() {
    let out = loopgas(&[
        "groundstate-check",
        "--topology",
        "torus",
        "--lx",
        "2",
        "--ly",
        "2",
        "--sector-a",
        "2x",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn passing_run_exits_zero_and_writes_a_full_report() {
    let dir = tempfile::tempdir().expect("tempdir");
    let json = dir.path().join("report.json");
    let out = loopgas(&[
        "groundstate-check",
        "--topology",
        "annulus",
        "--lx",
        "2",
        "--ly",
        "1",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("result: PASS"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["experiment"], "groundstate-check");
    assert_eq!(report["topology"], "annulus");
    assert_eq!(report["passed"], true);
    assert!(report["assertions"].as_array().unwrap().len() >= 5);
    assert!(report["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sector_flags_restrict_the_checked_pair() {
    let out = loopgas(&[
        "groundstate-check",
        "--topology",
        "annulus",
        "--lx",
        "2",
        "--ly",
        "1",
        "--sector-a",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("result: PASS"));
}

#[test]
fn honest_failure_exits_one_and_reports_the_measured_value() {
    let dir = tempfile::tempdir().expect("tempdir");
    let json = dir.path().join("degeneracy.json");
    let out = loopgas(&[
        "degeneracy",
        "--topology",
        "annulus",
        "--lx",
        "2",
        "--ly",
        "1",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "stdout: {}", stdout(&out));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["values"]["kernel_dim_expected"], 3);
    assert_eq!(report["values"]["kernel_dim_measured"], 4);

    // Eigenvalue runs also leave a CSV sidecar next to the JSON report.
    let csv = std::fs::read_to_string(dir.path().join("degeneracy.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    assert!(lines.next().unwrap().starts_with("0,"));
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut bodies = Vec::new();
    for name in ["a.json", "b.json"] {
        let json = dir.path().join(name);
        let out = loopgas(&[
            "commutators",
            "--topology",
            "torus",
            "--lx",
            "2",
            "--ly",
            "2",
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let mut report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        report["wall_seconds"] = serde_json::json!(0.0);
        bodies.push(serde_json::to_string(&report).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}
