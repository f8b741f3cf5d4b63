//! The `kgalign` binary: exit codes and the train / eval / analyze round trip.

use std::path::Path;
use std::process::{Command, Output};

use kgalign::synthetic::{isomorphic_twin, TwinConfig};
use tempfile::TempDir;

fn kgalign(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgalign"))
        .args(args)
        .current_dir(cwd)
        .env_remove("KGALIGN_DATA_ROOT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_method_exits_1_without_creating_a_run() {
    let tmp = TempDir::new().unwrap();
    let o = kgalign(&["train", "--method", "transq", "--output-dir", "runs"], tmp.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("transq"));
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn malformed_command_lines_exit_1() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&kgalign(&["frobnicate"], tmp.path())), 1);
    assert_eq!(code(&kgalign(&["eval"], tmp.path())), 1);
    assert_eq!(code(&kgalign(&["--help"], tmp.path())), 0);
}

#[test]
fn missing_dataset_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = kgalign(&["train", "--data", "nowhere", "--output-dir", "runs"], tmp.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn bad_config_file_exits_1() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("c.toml"), "method = \"gcnalign\"\nlearning_rat = 3\n").unwrap();
    let o = kgalign(&["train", "-c", "c.toml"], tmp.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn train_eval_analyze_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cwd = tmp.path();
    isomorphic_twin(&TwinConfig::default()).write(cwd.join("data/twin")).unwrap();
    std::fs::write(
        cwd.join("exp.toml"),
        "method = \"gcnalign\"\nseed = 3\n\n[data]\ndir = \"twin\"\n\n[gcn]\nmax_epochs = 50\n",
    )
    .unwrap();

    let o = kgalign(&["train", "-c", "exp.toml", "--data-root", "data", "--run-dir", "run"], cwd);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("gcnalign"));
    assert!(cwd.join("run/config.toml").is_file());

    let o = kgalign(&["eval", "--run", "run", "--csls", "auto"], cwd);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(stdout.contains("[nn]") && stdout.contains("[csls]"), "{stdout}");
    assert!(cwd.join("run/eval/report.json").is_file());

    let o = kgalign(
        &["eval", "--embeddings", "run", "--dataset", "data/twin", "--test-links", "run/test_links.tsv", "--out", "e2"],
        cwd,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let o = kgalign(&["analyze", "run/eval/report.json", "e2/report.json", "--out", "cmp"], cwd);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = std::fs::read_to_string(cwd.join("cmp/comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 2 + 2);
}

#[test]
fn eval_of_a_missing_run_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = kgalign(&["eval", "--run", "absent"], tmp.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}
