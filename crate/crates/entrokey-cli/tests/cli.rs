//! End-to-end checks of the `entrokey` binary: subcommand chaining, config
//! layering, the ENTROKEY_OUT override, determinism, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn entrokey() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_entrokey"));
    cmd.env_remove("ENTROKEY_OUT");
    cmd
}

fn run_ok(cmd: &mut Command) -> Output {
    let output = cmd.output().expect("binary runs");
    assert!(
        output.status.success(),
        "command {:?} failed:\n{}",
        cmd,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn seed_corpus(dir: &Path) {
    run_ok(entrokey().args([
        "--seed",
        "7",
        "--out-dir",
        dir.to_str().unwrap(),
        "synth",
        "--pos-docs",
        "40",
        "--neg-docs",
        "40",
        "--unlabeled",
        "10",
        "--planted-pos",
        "8",
        "--planted-neg",
        "8",
        "--shared",
        "10",
        "--doc-length",
        "8",
        "--noise",
        "0.05",
    ]));
}

#[test]
fn subcommand_chain_labels_unlabeled_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    seed_corpus(dir.path());

    let synthetic = dir.path().join("synthetic.jsonl");
    run_ok(entrokey().args([
        "--out-dir",
        out,
        "ingest",
        "--input",
        synthetic.to_str().unwrap(),
        "--split-sentences",
        "false",
    ]));
    run_ok(entrokey().args(["--out-dir", out, "segment"]));
    run_ok(entrokey().args(["--seed", "7", "--out-dir", out, "grid", "--k", "3"]));
    run_ok(entrokey().args([
        "--seed",
        "7",
        "--out-dir",
        out,
        "train",
        "--keywords",
        dir.path().join("keywords_combined.tsv").to_str().unwrap(),
        "--out",
        dir.path().join("model_positive.txt").to_str().unwrap(),
    ]));
    run_ok(entrokey().args([
        "--seed",
        "7",
        "--out-dir",
        out,
        "train",
        "--keywords",
        dir.path().join("keywords_negative.tsv").to_str().unwrap(),
        "--out",
        dir.path().join("model_negative.txt").to_str().unwrap(),
    ]));
    let predict = run_ok(entrokey().args(["--out-dir", out, "predict"]));

    let labeled = fs::read_to_string(dir.path().join("labeled.jsonl")).unwrap();
    assert_eq!(
        labeled.lines().count(),
        10,
        "one prediction per unlabeled doc"
    );
    assert!(dir.path().join("summary.json").exists());
    let stdout = String::from_utf8_lossy(&predict.stdout);
    assert!(
        stdout.contains("labeled 10 documents"),
        "unexpected predict output: {stdout}"
    );
}

#[test]
fn run_subcommand_is_deterministic_and_env_overrides_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    seed_corpus(dir.path());
    let config_path = dir.path().join("run.toml");
    fs::write(
        &config_path,
        format!(
            "[input]\ncorpus = {:?}\nsplit_sentences = false\n\n[eval]\nk = 3\n",
            dir.path().join("synthetic.jsonl")
        ),
    )
    .unwrap();

    let out_a = dir.path().join("a");
    run_ok(entrokey().args([
        "--config",
        config_path.to_str().unwrap(),
        "--seed",
        "7",
        "--out-dir",
        out_a.to_str().unwrap(),
        "run",
    ]));

    // ENTROKEY_OUT wins over the flag: artifacts land in b, and the flag's
    // directory is never created.
    let out_b = dir.path().join("b");
    let ignored = dir.path().join("ignored");
    let mut env_run = entrokey();
    env_run.env("ENTROKEY_OUT", &out_b).args([
        "--config",
        config_path.to_str().unwrap(),
        "--seed",
        "7",
        "--out-dir",
        ignored.to_str().unwrap(),
        "run",
    ]);
    run_ok(&mut env_run);
    assert!(!ignored.exists(), "--out-dir used despite ENTROKEY_OUT");

    for name in [
        "manifest.json",
        "keywords_combined.tsv",
        "model_positive.txt",
        "model_negative.txt",
        "reports.tsv",
        "labeled.jsonl",
    ] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn quiet_suppresses_informational_output() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_ok(entrokey().args([
        "--quiet",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "synth",
        "--pos-docs",
        "2",
        "--neg-docs",
        "2",
        "--unlabeled",
        "0",
        "--planted-pos",
        "2",
        "--planted-neg",
        "2",
        "--shared",
        "2",
        "--doc-length",
        "4",
    ]));
    assert!(output.stdout.is_empty());
    assert!(dir.path().join("synthetic.jsonl").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    fs::write(
        &config_path,
        "[keywords]\nalpha_min = 3.0\nalpha_max = 1.0\n",
    )
    .unwrap();
    let output = entrokey()
        .args(["--config", config_path.to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = entrokey()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "segment",
            "--mode",
            "bogus",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "clap value errors exit 2");
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("garbled.jsonl");
    fs::write(&corpus, "not json\n").unwrap();
    let output = entrokey()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "ingest",
            "--input",
            corpus.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("malformed record"), "stderr: {stderr}");
}

#[test]
fn stage_failures_exit_4_and_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let output = entrokey()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "run",
            "--input",
            dir.path().join("missing.jsonl").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("stage ingest failed"), "stderr: {stderr}");
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(
        manifest.contains("\"failed\""),
        "manifest records the failure"
    );
}

#[test]
fn help_lists_every_subcommand() {
    let output = run_ok(entrokey().arg("--help"));
    let text = String::from_utf8_lossy(&output.stdout);
    for name in [
        "ingest", "segment", "keywords", "train", "eval", "grid", "predict", "report", "synth",
        "run",
    ] {
        assert!(text.contains(name), "--help does not mention {name}");
    }
}
