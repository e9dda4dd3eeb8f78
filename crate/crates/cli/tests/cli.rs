use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/survey_sample.csv")
}

fn reqmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqmine"))
        .args(args)
        .env("REQMINE_NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

#[test]
fn analyze_text_report() {
    let out = reqmine(&["analyze", "--input", sample().to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Requirement matrix"));
    assert!(stdout.contains("Priority order"));
    assert!(!stdout.contains('\x1b'));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("warning: skipped edge"));
}

#[test]
fn json_matches_golden_and_dot_written() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let dot_path = dir.path().join("graph.dot");
    let out = reqmine(&[
        "analyze",
        "--input",
        sample().to_str().unwrap(),
        "--format",
        "json",
        "--out",
        json_path.to_str().unwrap(),
        "--dot",
        dot_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());

    let json = std::fs::read_to_string(&json_path).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures/survey_sample.report.json");
    assert_eq!(json, std::fs::read_to_string(golden).unwrap());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["spanning_forest"]["component_count"], 3);

    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert!(dot.starts_with("graph G {"));
    assert!(dot.contains("style=bold"));
}

#[test]
fn parameters_change_the_result() {
    let out = reqmine(&[
        "analyze",
        "--input",
        sample().to_str().unwrap(),
        "--format",
        "json",
        "--min-support",
        "0.8",
        "--min-lift",
        "1.1",
        "--complete-graph",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let top: Vec<&str> = v["top_requirements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["attribute"].as_str().unwrap())
        .collect();
    assert_eq!(
        top,
        [
            "Custom Mash up",
            "eTutor teaches according to the level",
            "Choose look of etutor",
            "Random question",
            "intuitive_reasoning"
        ]
    );
    for r in v["rules"].as_array().unwrap() {
        assert!(r["lift"].as_f64().unwrap() >= 1.1);
    }
}

#[test]
fn ragged_row_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "A,B\n1,0\n1\n").unwrap();
    let out = reqmine(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(reqmine(&["analyze"]).status.code(), Some(1));
    let out = reqmine(&["analyze", "--input", "/no/such/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = reqmine(&[
        "analyze",
        "--input",
        sample().to_str().unwrap(),
        "--min-confidence",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
