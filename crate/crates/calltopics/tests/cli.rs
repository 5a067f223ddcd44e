//! Integration tests that drive the compiled binary the way a user would.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_calltopics")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary spawns")
}

fn assert_ok(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn stats_reports_hand_counted_three_node_tree() {
    use calltopics::ontology::Ontology;
    use chrono::NaiveDate;

    let dir = tempfile::tempdir().unwrap();
    let day = NaiveDate::from_ymd_opt(2023, 5, 1).unwrap();
    let mut tree = Ontology::new(4).unwrap();
    let root = tree.insert_node("Guidance", None, day).unwrap();
    tree.insert_node("Full-year guidance", Some(root), day).unwrap();
    tree.insert_node("Quarterly guidance", Some(root), day).unwrap();
    let path = dir.path().join("tree.json");
    tree.save(&path).unwrap();

    let output = run_in(
        dir.path(),
        &["stats", "--ontology", path.to_str().unwrap()],
    );
    let stats = assert_ok(&output);
    assert_eq!(stats["total_nodes"], 3);
    assert_eq!(stats["num_leaf_nodes"], 2);
    assert_eq!(stats["num_levels"], 2);
    assert_eq!(stats["nodes_per_level"][0], 1);
    assert_eq!(stats["nodes_per_level"][1], 2);
}

#[test]
fn synth_then_build_twice_produces_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_ok(&run_in(dir.path(), &["--out-dir", out, "synth"]));

    let config = dir.path().join("config.json");
    let config = config.to_str().unwrap();
    let snapshot = |label: &str| {
        assert_ok(&run_in(
            dir.path(),
            &["--config", config, "--out-dir", out, "build"],
        ));
        let ontology = std::fs::read(dir.path().join("ontology.json")).unwrap();
        let enrichments = std::fs::read(dir.path().join("enrichments.jsonl")).unwrap();
        assert!(!ontology.is_empty(), "{label}: empty ontology");
        (ontology, enrichments)
    };
    let first = snapshot("first build");
    let second = snapshot("second build");
    assert_eq!(first, second, "rebuilds must be byte-identical");
}

#[test]
fn csv_format_writes_parseable_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_ok(&run_in(dir.path(), &["--out-dir", out, "synth"]));
    let config = dir.path().join("config.json");
    let config = config.to_str().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["--config", config, "--out-dir", out, "build"],
    ));

    let output = run_in(
        dir.path(),
        &[
            "--config",
            config,
            "--out-dir",
            out,
            "--format",
            "csv",
            "trends",
            "--company",
            "TSLA",
        ],
    );
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let on_disk = std::fs::read_to_string(dir.path().join("trends.csv")).unwrap();
    assert_eq!(stdout, on_disk, "stdout must mirror the written file");

    let mut reader = csv::Reader::from_reader(on_disk.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers,
        csv::StringRecord::from(vec![
            "company", "topic_id", "topic_name", "tau", "p_value", "direction"
        ])
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert!(rows.iter().any(|r| &r[2] == "Supply Chain" && &r[5] == "down"));
    assert!(rows.iter().any(|r| &r[2] == "Generative AI" && &r[5] == "up"));
}

#[test]
fn unknown_flags_and_bad_values_exit_with_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["--bogus-flag", "synth"]);
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("--bogus-flag"));

    let output = run_in(dir.path(), &["emerging", "--split", "2023-13-45"]);
    assert_eq!(output.status.code(), Some(2));

    // Help and version are not errors.
    let output = run_in(dir.path(), &["--help"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stdout).contains("synth"));
    let output = run_in(dir.path(), &["--version"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn http_provider_without_config_section_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_ok(&run_in(dir.path(), &["--out-dir", out, "synth"]));
    let config = dir.path().join("config.json");
    let output = run_in(
        dir.path(),
        &[
            "--config",
            config.to_str().unwrap(),
            "--provider",
            "http",
            "build",
        ],
    );
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}
