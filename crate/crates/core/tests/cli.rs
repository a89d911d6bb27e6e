use std::path::Path;
use std::process::{Command, Output};

use hrvlab::diagnostics::DetectionReport;
use hrvlab::pipeline::io::{read_batch_csv_file, read_report};
use hrvlab::pipeline::ExperimentSummary;
use sha2::{Digest, Sha256};

fn hrvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrvlab"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sha(p: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(p).unwrap()).to_vec()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_writes_rows_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = hrvlab(&[
        "generate",
        "--experiment",
        "ex31-case1",
        "--n",
        "10000",
        "--seed",
        "42",
        "--out",
        path(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("z1,z2"));
    assert_eq!(text.lines().count(), 10_001);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["batch"]["seed"], 42);
    assert_eq!(meta["experiment"], "ex31-case1");
    assert!(meta["rng"].as_str().unwrap().contains("chacha20"));
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = hrvlab(&[
            "generate",
            "--experiment",
            "ex31-case1",
            "--n",
            "10000",
            "--seed",
            "42",
            "--out",
            path(p),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(sha(&a), sha(&b));
}

#[test]
fn zero_rows_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let o = hrvlab(&[
        "generate",
        "--experiment",
        "ex32-case3",
        "--n",
        "0",
        "--out",
        path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "z1,z2\n");
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = hrvlab(&[
        "generate",
        "--experiment",
        "ex32-case2",
        "--n",
        "2000",
        "--seed",
        "3",
        "--partitions",
        "3",
        "--out",
        path(&csv),
    ]);
    assert!(o.status.success());
    let spec = "ex32-case2"
        .parse::<hrvlab::pipeline::Experiment>()
        .unwrap()
        .spec();
    let expected = hrvlab::generators::generate(&spec, 2000, 3, 3).unwrap();
    assert_eq!(read_batch_csv_file(&csv).unwrap().pairs, expected.pairs);
}

#[test]
fn detect_on_generated_sample() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = dir.path().join("report");
    assert!(hrvlab(&[
        "generate",
        "--experiment",
        "ex31-case3",
        "--n",
        "10000",
        "--seed",
        "7",
        "--out",
        path(&csv)
    ])
    .status
    .success());
    let o = hrvlab(&["detect", "--in", path(&csv), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: DetectionReport = read_report(&out.join("report.json")).unwrap();
    assert!(report.series.len() >= 13);
    for (label, s) in &report.series {
        assert!(!s.is_empty(), "{label} is empty");
        assert!(out.join(format!("series_{label}.csv")).exists());
    }
    for (label, d) in &report.densities {
        assert!(!d.grid.is_empty(), "{label} is empty");
    }
    assert!(report.qq.values().all(|q| !q.is_empty()));
    assert_eq!(report.meta.source.seed, Some(7));
    let head = std::fs::read_to_string(out.join("series_min_hill.csv")).unwrap();
    assert!(head.starts_with("k,value\n"));
}

#[test]
fn detect_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = dir.path().join("r");
    assert!(hrvlab(&[
        "generate",
        "--experiment",
        "ex31-case1",
        "--n",
        "4000",
        "--seed",
        "1",
        "--out",
        path(&csv)
    ])
    .status
    .success());
    let o = hrvlab(&[
        "detect",
        "--in",
        path(&csv),
        "--out",
        path(&out),
        "--q",
        "0.6,0.9",
        "--thresholds",
        "50,150",
        "--rank-mode",
        "raw",
        "--k-step",
        "7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_report(&out.join("report.json")).unwrap();
    assert_eq!(r.meta.q_list, vec![0.6, 0.9]);
    assert_eq!(r.meta.thresholds, vec![50, 150]);
    assert_eq!(r.meta.k_grid[1] - r.meta.k_grid[0], 7);
    assert!(r.series.contains_key("pickandsish_first_q0.9"));
    assert!(r.series.contains_key("ratio_tail_hill_max_t150"));
}

#[test]
fn malformed_row_names_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    let mut text = String::from("z1,z2\n");
    for i in 2..=20 {
        if i == 12 {
            text.push_str("3.5,oops\n");
        } else {
            text.push_str(&format!("{i},{}\n", i + 1));
        }
    }
    std::fs::write(&csv, text).unwrap();
    let o = hrvlab(&[
        "detect",
        "--in",
        path(&csv),
        "--out",
        path(&dir.path().join("r")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 12"), "{}", stderr(&o));
}

#[test]
fn negative_value_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("neg.csv");
    std::fs::write(&csv, "z1,z2\n1,2\n-3,4\n").unwrap();
    let o = hrvlab(&[
        "detect",
        "--in",
        path(&csv),
        "--out",
        path(&dir.path().join("r")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("domain"));
}

#[test]
fn unknown_experiment_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = hrvlab(&[
        "experiment",
        "--experiment",
        "ex33",
        "--out",
        path(&dir.path().join("x.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(
        msg.contains("ex31-case1") && msg.contains("ex32-case3"),
        "{msg}"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hrvlab(&[]).status.code(), Some(1));
    assert_eq!(
        hrvlab(&["generate", "--n", "5", "--out", "x.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hrvlab(&["detect", "--bogus"]).status.code(), Some(1));
    assert_eq!(hrvlab(&["--help"]).status.code(), Some(0));
    assert_eq!(hrvlab(&["--version"]).status.code(), Some(0));
}

#[test]
fn experiment_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.json");
    let cfg = dir.path().join("run.json");
    let json = serde_json::json!({
        "command": "experiment",
        "experiment": "ex32-case1",
        "replications": 2,
        "n": 3000,
        "seed": 5,
        "output": out,
    });
    std::fs::write(&cfg, json.to_string()).unwrap();
    let o = hrvlab(&["--config", path(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: ExperimentSummary =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s.seeds, vec![5, 6]);
    assert_eq!(s.per_replication.len(), 2);

    // the same run again is byte-identical
    let first = std::fs::read(&out).unwrap();
    assert!(hrvlab(&["--config", path(&cfg)]).status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn config_with_stray_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command":"detect","input":"a.csv","output":"r","n":10}"#,
    )
    .unwrap();
    let o = hrvlab(&["--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n"));
}
