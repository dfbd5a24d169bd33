//! End-to-end tests that drive the compiled binary: exit codes, stdout
//! contents, and the artifacts each subcommand writes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_screenaudit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(output),
        stderr_of(output)
    );
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// A dataset small enough that training finishes in a couple of seconds.
fn tiny_replicate_config(dir: &Path) -> String {
    let path = dir.join("tiny.json");
    fs::write(
        &path,
        r#"{
  "dataset_spec": {
    "n_participants": 8,
    "n_deceptive": 4,
    "n_features": 6,
    "n_questions": 3,
    "target_total_vectors": 288,
    "class_effect_scale": 2.0,
    "noise_scale": 1.0,
    "seed": 11
  },
  "hyperparams": {
    "hidden_width": 6,
    "learning_rate": 1.5,
    "epochs": 120,
    "grouped_folds": 3,
    "leaked_folds": 3
  }
}"#,
    )
    .unwrap();
    path.display().to_string()
}

#[test]
fn posterior_prints_reference_values_and_writes_json() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "posterior",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "0.7555",
        "--prior",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = stdout_of(&output);
    assert!(text.contains("13.69%"), "{text}");
    assert!(text.contains("98.20%"), "{text}");
    assert!(text.contains("269.1050"), "{text}");

    let json: serde_json::Value = serde_json::from_str(&read(&out.join("posterior.json"))).unwrap();
    let ppv = json["ppv"].as_f64().unwrap();
    assert!((ppv - 0.1368610765314654).abs() < 1e-12, "ppv {ppv}");
    assert!(out.join("effective_config.json").exists());
}

#[test]
fn posterior_reports_undefined_when_nothing_is_flagged() {
    let dir = TempDir::new().unwrap();
    let output = run(&[
        "posterior",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "1.0",
        "--prior",
        "0.0",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    assert!(stdout_of(&output).contains("undefined"), "{}", stdout_of(&output));
}

#[test]
fn posterior_requires_test_characteristics() {
    let dir = TempDir::new().unwrap();
    let output = run(&[
        "posterior",
        "--prior",
        "0.05",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    assert!(stderr_of(&output).contains("sensitivity"), "{}", stderr_of(&output));
}

#[test]
fn out_of_range_values_exit_two_with_the_field_name() {
    let dir = TempDir::new().unwrap();
    let output = run(&[
        "posterior",
        "--sensitivity",
        "1.2",
        "--specificity",
        "0.7555",
        "--prior",
        "0.05",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    assert!(stderr_of(&output).contains("sensitivity"), "{}", stderr_of(&output));
}

#[test]
fn unknown_config_keys_exit_two_by_name() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{ "sensibility": 0.9 }"#).unwrap();
    let output = run(&[
        "posterior",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    assert!(stderr_of(&output).contains("sensibility"), "{}", stderr_of(&output));
}

#[test]
fn sweep_injects_the_highlight_prior_into_the_grid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "sweep",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "0.7555",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = stdout_of(&output);
    assert!(text.contains("at prior 5.00%: PPV 13.69%, NPV 98.20%"), "{text}");
    assert!(text.contains("prior needed for PPV to reach 50.00%: 24.92%"), "{text}");

    let csv = read(&out.join("sweep.csv"));
    let row = csv
        .lines()
        .find(|l| l.starts_with("0.05,"))
        .unwrap_or_else(|| panic!("no 0.05 row in:\n{csv}"));
    assert!(row.contains("0.1368610765314654"), "{row}");

    let svg = read(&out.join("sweep.svg"));
    assert!(svg.starts_with("<svg"), "{}", &svg[..40]);
    assert!(svg.contains("stroke-dasharray"), "highlight marker missing");
}

#[test]
fn tree_prints_and_draws_four_decimal_expected_counts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "tree",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "0.7555",
        "--prior",
        "0.01",
        "--population",
        "10000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    assert!(stdout_of(&output).contains("2420.5500"), "{}", stdout_of(&output));
    assert!(read(&out.join("tree.svg")).contains("2420.5500"));
}

#[test]
fn simulate_writes_replicates_that_conserve_the_population() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "simulate",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "0.7555",
        "--prior",
        "0.05",
        "--population",
        "1000",
        "--replicates",
        "50",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);

    let csv = read(&out.join("replicates.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("replicate,tp,fp,fn,tn"));
    let mut rows = 0;
    for line in lines {
        let cells: Vec<u64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1] + cells[2] + cells[3] + cells[4], 1000, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 50);

    let json: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert!(json["empirical_ppv"]["value"].as_f64().is_some());
    assert!(json["closed_form_ppv"].as_f64().is_some());
}

#[test]
fn simulate_rejects_zero_replicates_as_config_error() {
    let dir = TempDir::new().unwrap();
    let output = run(&[
        "simulate",
        "--sensitivity",
        "0.7366",
        "--specificity",
        "0.7555",
        "--prior",
        "0.05",
        "--replicates",
        "0",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    assert!(stderr_of(&output).contains("replicate"), "{}", stderr_of(&output));
}

#[test]
fn replicate_writes_fold_tables_and_the_gap_verdict() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let config = tiny_replicate_config(dir.path());
    let exported = dir.path().join("segments.csv");
    let output = run(&[
        "replicate",
        "--config",
        &config,
        "--export-dataset",
        exported.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = stdout_of(&output);
    assert!(text.contains("mean"), "{text}");
    assert!(text.contains("verdict"), "{text}");

    let grouped = read(&out.join("grouped.csv"));
    assert!(grouped.starts_with("fold,truthful,deceptive\n"), "{grouped}");
    assert_eq!(grouped.lines().count(), 1 + 3);
    assert!(read(&out.join("leaked.csv")).starts_with("fold,truthful,deceptive\n"));
    let folds = read(&out.join("folds.csv"));
    assert!(folds.contains("grouped,1,"), "{folds}");
    assert!(folds.contains("segment_level,1,"), "{folds}");

    let gap: serde_json::Value = serde_json::from_str(&read(&out.join("gap.json"))).unwrap();
    assert!(gap["gap"]["leakage_flagged"].is_boolean());
    assert_eq!(gap["grouped"]["folds"].as_array().unwrap().len(), 3);

    // The exported dataset can be audited directly.
    let diag_out = dir.path().join("diag");
    let output = run(&[
        "diagnose",
        "--dataset",
        exported.to_str().unwrap(),
        "--out",
        diag_out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let json: serde_json::Value =
        serde_json::from_str(&read(&diag_out.join("diagnostics.json"))).unwrap();
    assert_eq!(json["n_participants"], 8);
    assert_eq!(json["n_segments"], 288);
}

#[test]
fn replicate_on_a_single_class_dataset_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let dataset = dir.path().join("truthful_only.csv");
    let mut csv = String::from("participant_id,question,label,f1,f2,f3\n");
    for participant in 0..4 {
        for question in 1..=2 {
            for segment in 0..3 {
                csv.push_str(&format!(
                    "{participant},{question},truth,0.{segment},1.0,-0.5\n"
                ));
            }
        }
    }
    fs::write(&dataset, csv).unwrap();

    let output = run(&[
        "replicate",
        "--dataset",
        dataset.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_exit(&output, 3);
    assert!(stderr_of(&output).contains("participants"), "{}", stderr_of(&output));
}

#[test]
fn diagnose_flags_the_wide_feature_matrix() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let config = dir.path().join("diag.json");
    // 12 features for 8 participants (6 after holdout): flagged.
    fs::write(
        &config,
        r#"{ "dataset_spec": {
            "n_participants": 8, "n_deceptive": 4, "n_features": 12,
            "n_questions": 2, "target_total_vectors": 320, "seed": 3 } }"#,
    )
    .unwrap();
    let output = run(&[
        "diagnose",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let json: serde_json::Value =
        serde_json::from_str(&read(&out.join("diagnostics.json"))).unwrap();
    assert_eq!(json["dimensionality"]["flagged"], true);
    let icc = json["intraclass_correlation"].as_f64().unwrap();
    assert!(icc > 0.0 && icc <= 1.0, "icc {icc}");
    let ess = json["effective_sample_size"].as_f64().unwrap();
    assert!(ess < 320.0, "ess {ess}");
}

#[test]
fn help_exits_zero_and_unknown_flags_exit_two() {
    let output = run(&["--help"]);
    assert_exit(&output, 0);
    assert!(stdout_of(&output).contains("screenaudit"));

    let output = run(&["posterior", "--no-such-flag"]);
    assert_exit(&output, 2);
}

#[test]
fn posterior_artifacts_are_byte_identical_across_reruns() {
    let dir = TempDir::new().unwrap();
    let args = |out: &Path| {
        vec![
            "posterior".to_string(),
            "--sensitivity".into(),
            "0.7366".into(),
            "--specificity".into(),
            "0.7555".into(),
            "--prior".into(),
            "0.05".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert_exit(&bin().args(args(&out_a)).output().unwrap(), 0);
    assert_exit(&bin().args(args(&out_b)).output().unwrap(), 0);
    assert_eq!(
        read(&out_a.join("posterior.json")),
        read(&out_b.join("posterior.json"))
    );
}
