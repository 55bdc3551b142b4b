use std::path::Path;
use std::process::{Command, Output};

fn pgdnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgdnn")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_data_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = pgdnn(&["gen-data", "--seed", "3", "--out-dir", path(d)]);
        assert!(out.status.success());
    }
    let lines = |name: &str| std::fs::read_to_string(a.join(name)).unwrap().lines().count();
    assert_eq!(lines("grid.csv"), 501);
    assert_eq!(lines("test1.csv"), 240);
    assert_eq!(lines("test2.csv"), 102);
    assert_eq!(lines("train30.csv"), 31);
    for name in ["grid.csv", "test1.csv", "test2.csv", "train261.csv", "train117.csv", "train60.csv", "train30.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn gen_data_seed_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(pgdnn(&["gen-data", "--seed", "1", "--out-dir", path(&a)]).status.success());
    assert!(pgdnn(&["gen-data", "--seed", "2", "--out-dir", path(&b)]).status.success());
    assert_ne!(
        std::fs::read(a.join("train261.csv")).unwrap(),
        std::fs::read(b.join("train261.csv")).unwrap()
    );
}

#[test]
fn filtered_grid_runs_one_config_and_report_rebuilds() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgdnn(&[
        "run-grid", "--seed", "5", "--train-size", "30", "--physics", "D", "--layers", "2-4",
        "--ensemble", "3", "--jobs", "1", "--out-dir", path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let jsonl = std::fs::read_to_string(dir.path().join("results.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 1);
    assert!(jsonl.contains("\"config_id\":\"n030-L2-4-D\""));
    let trace = std::fs::read_to_string(dir.path().join("traces/n030-L2-4-D.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header plus one row per test set");

    // report from the saved results alone reproduces the tables
    let rebuilt = dir.path().join("rebuilt");
    let out = pgdnn(&[
        "report",
        "--out-dir",
        path(&rebuilt),
        "--input",
        path(&dir.path().join("results.jsonl")),
    ]);
    assert!(out.status.success());
    for name in ["results.csv", "summary.json", "pivot_test1_n030.csv", "pivot_test2_n030.csv"] {
        assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(rebuilt.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn train_one_writes_history_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgdnn(&[
        "train-one", "--seed", "9", "--train-size", "30", "--physics", "W,D", "--layers", "1",
        "--out-dir", path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let history = std::fs::read_to_string(dir.path().join("loss_history.csv")).unwrap();
    assert_eq!(history.lines().next(), Some("epoch,train_loss,val_loss"));
    assert_eq!(history.lines().count(), 501);
    let params = std::fs::read_to_string(dir.path().join("params.txt")).unwrap();
    assert!(params.starts_with("pgdnn-params 1\nscheme L1\nphysics 2\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config_id"], "n030-L1-WD");
    assert_eq!(summary["optimizer_steps"], 500);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["no-such-command"],
        &["run-grid", "--physics", "D", "--layers", "none", "--out-dir", path(dir.path())],
        &["run-grid", "--train-size", "50", "--out-dir", path(dir.path())],
        &["train-one", "--physics", "X", "--layers", "1"],
        &["run-grid", "--ensemble", "0"],
    ];
    for args in cases {
        assert_eq!(pgdnn(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(pgdnn(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.jsonl");
    let out = pgdnn(&["report", "--out-dir", path(dir.path()), "--input", path(&missing)]);
    assert_eq!(out.status.code(), Some(2));
}
