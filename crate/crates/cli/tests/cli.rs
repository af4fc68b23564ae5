//! End-to-end tests of the `multipure` binary.

use std::path::Path;
use std::process::{Command, Output};

use multipure::protocols::{P1Engine, TransitionTensor};
use multipure::Step;
use multipure_cli::{oracle_check, report_oracle, EXIT_FAILED, EXIT_OK};

fn multipure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multipure"))
        .args(args)
        .env_remove(multipure_cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV with a `#` metadata line and a header.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# multipure "));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn field(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

#[test]
fn evolve_binary_follows_the_recursion() {
    let out = multipure(&[
        "evolve",
        "--family",
        "binary",
        "--n",
        "2",
        "--f",
        "0.75",
        "--schedule",
        "p1",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        [
            "iteration",
            "step",
            "fidelity",
            "keep_prob",
            "cumulative_P",
            "efficiency"
        ]
    );
    assert_eq!(rows[0][1], "init");
    assert_eq!(field(&rows[0], 2), 0.75);
    assert!((field(&rows[1], 2) - 0.9).abs() < 1e-15);
    assert!((field(&rows[2], 2) - 0.81 / 0.82).abs() < 1e-15);
    assert!(rows[1..].iter().all(|r| r[1] == "p1"));
    // 17 significant digits in every float column.
    assert_eq!(rows[1][2].split('e').next().unwrap().len(), 18);
}

#[test]
fn evolve_exit_codes() {
    let pure = multipure(&["evolve", "--family", "werner", "--n", "3", "--f", "1.0"]);
    assert_eq!(pure.status.code(), Some(EXIT_OK));
    assert_eq!(csv_rows(&stdout(&pure)).1.len(), 1);

    let low = multipure(&["evolve", "--family", "werner", "--n", "3", "--f", "0.30"]);
    assert_eq!(low.status.code(), Some(EXIT_FAILED));

    let capped = multipure(&["evolve", "--n", "3", "--f", "0.5", "--max-iterations", "3"]);
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(csv_rows(&stdout(&capped)).1.len(), 4);
}

#[test]
fn invalid_configs_name_the_field() {
    let cases: [(&[&str], &str); 6] = [
        (&["evolve", "--n", "3", "--f", "1.5"], "--f"),
        (&["evolve", "--n", "1", "--f", "0.5"], "--n"),
        (
            &["evolve", "--n", "3", "--f", "0.5", "--schedule", "p3"],
            "--schedule",
        ),
        (
            &["evolve", "--n", "3", "--f", "0.5", "--accuracy", "0"],
            "--accuracy",
        ),
        (&["compare", "--n", "3", "--grid", "0.5:0.4:0.1"], "--grid"),
        (&["evolve", "--n", "3"], "--f"),
    ];
    for (args, name) in cases {
        let out = multipure(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(name), "{args:?}: {err}");
    }
    assert_eq!(multipure(&["--help"]).status.code(), Some(EXIT_OK));
    assert_eq!(multipure(&["bogus"]).status.code(), Some(1));
}

fn threshold(args: &[&str]) -> serde_json::Value {
    let out = multipure(args);
    assert_eq!(
        out.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn threshold_examples() {
    let v = threshold(&["threshold", "--family", "werner", "--n", "2"]);
    assert!((v["threshold"].as_f64().unwrap() - 0.5395).abs() < 1e-3);
    for key in [
        "n",
        "family",
        "schedule",
        "threshold",
        "bracket",
        "accuracy",
        "meta",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let v = threshold(&[
        "threshold",
        "--family",
        "zero-pairing",
        "--n",
        "3",
        "--schedule",
        "p2",
    ]);
    assert!((v["threshold"].as_f64().unwrap() - 0.25).abs() < 1e-4);
    let v = threshold(&[
        "threshold",
        "--family",
        "binary",
        "--n",
        "4",
        "--schedule",
        "p1",
    ]);
    assert!((v["threshold"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    let v = threshold(&["threshold", "--family", "werner", "--n", "3", "--indirect"]);
    assert!((v["threshold"].as_f64().unwrap() - 5.0 / 12.0).abs() < 1e-4);
}

#[test]
fn compare_examples() {
    let out = multipure(&["compare", "--n", "3", "--grid", "0.40:1.00:0.05"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        ["f", "direct_eff", "indirect_eff", "direct_J", "indirect_J"]
    );
    assert_eq!(rows.len(), 13);
    // Below both thresholds: empty efficiency cells.
    assert_eq!(&rows[0][1..], ["", "", "", ""]);
    for row in rows
        .iter()
        .filter(|r| (0.55 - 1e-9..1.0).contains(&field(r, 0)))
    {
        assert!(field(row, 1) >= field(row, 2), "{row:?}");
    }
    let last = rows.last().unwrap();
    assert_eq!(field(last, 1), 1.0);
    assert_eq!(field(last, 2), 0.5);
}

#[test]
fn compare_gap_grows_with_party_count() {
    let gap = |n: &str| {
        let out = multipure(&["compare", "--n", n, "--grid", "0.7:0.7:0.1"]);
        let (_, rows) = csv_rows(&stdout(&out));
        field(&rows[0], 1) - field(&rows[0], 2)
    };
    assert!(gap("4") > gap("3"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = multipure(&[
            "compare",
            "--n",
            "3",
            "--family",
            "perturbed-werner",
            "--seed",
            "5",
            "--grid",
            "0.5:0.9:0.1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(EXIT_OK));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# multipure 0.1.0 compare"));
    assert!(text.lines().next().unwrap().contains("seed=5"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_multipure"))
        .args([
            "threshold",
            "--family",
            "binary",
            "--n",
            "2",
            "--schedule",
            "p1",
        ])
        .env(multipure_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    let written: serde_json::Value = serde_json::from_slice(
        &std::fs::read(Path::new(dir.path()).join("threshold.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(written["n"], 2);
}

#[test]
fn json_evolve_output() {
    let out = multipure(&["evolve", "--n", "3", "--f", "0.8", "--format", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "Converged");
    assert_eq!(v["records"][0]["step"], "init");
    assert_eq!(v["meta"]["config"]["n"], "3");
}

#[test]
fn oracle_check_passes_on_the_real_maps() {
    for args in [
        &[
            "oracle-check",
            "--n",
            "3",
            "--samples",
            "100",
            "--seed",
            "7",
        ][..],
        &["oracle-check", "--n", "2", "--samples", "100"][..],
    ] {
        let out = multipure(args);
        assert_eq!(out.status.code(), Some(EXIT_OK));
        assert!(stdout(&out).contains("ok"));
    }
    assert_eq!(
        multipure(&["oracle-check", "--n", "5"]).status.code(),
        Some(1)
    );
}

#[test]
fn oracle_check_flags_a_tampered_tensor() {
    let build = TransitionTensor::build(3, Step::P1).unwrap();
    let mut entries = build.tensor.entries().to_vec();
    entries[0].weight *= 1.01;
    let tampered = P1Engine::Tensor(TransitionTensor::from_entries(3, entries).unwrap());
    let report = oracle_check(3, 20, 1, &tampered).unwrap();
    assert!(!report.passed());
    let mut text = Vec::new();
    assert_eq!(report_oracle(&report, &mut text).unwrap(), EXIT_FAILED);
    assert!(String::from_utf8(text).unwrap().contains("violation in p1"));
}
