use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use syndromic::harness::CSV_HEADER;
use syndromic::nn::MlpDecoderNet;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syndromic"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "lattice = 3\ncolour = blue\n");
    let out = run(&["evaluate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn missing_config_and_bad_flags_are_config_errors() {
    assert_eq!(run(&["evaluate", "--config", "/nonexistent.cfg"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ok.cfg", "lattice = 3\n");
    assert_eq!(
        run(&["evaluate", "--config", &cfg, "--decoder", "bp"]).status.code(),
        Some(2)
    );
}

#[test]
fn mwpm_evaluation_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let cfg = write_config(
        dir.path(),
        "run.cfg",
        "lattice = 3\nrates = 0, 0.1\ntrials = 200\ndecoders = mwpm, minweight\n",
    );
    let out = run(&[
        "evaluate",
        "--config",
        &cfg,
        "--seed",
        "11",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 11"));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,mwpm,joint,200,200,0,0,1,"));
    assert!(lines[1].ends_with(",11"));
}

#[test]
fn size_guard_and_missing_model_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ml.cfg",
        &format!(
            "lattice = 4\ntrials = 10\ndecoders = ml\nout = {}\n",
            dir.path().join("ml.csv").display()
        ),
    );
    assert_eq!(run(&["evaluate", "--config", &cfg]).status.code(), Some(3));

    let cfg = write_config(
        dir.path(),
        "nn.cfg",
        &format!(
            "lattice = 3\ntrials = 10\ndecoders = neural\nmodel_dir = {}\n",
            dir.path().join("none").display()
        ),
    );
    let out = run(&["evaluate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}

#[test]
fn train_then_evaluate_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    let body = format!(
        "lattice = 3\nrates = 0.1\ntrials = 200\ndecoders = neural, mwpm\n\
         train_batches = 1000\nlog_every = 250\nvalidation_size = 1000\n\
         max_iter = 100\nseed = 3\nmodel_dir = {}\nout = {}\n",
        models.display(),
        dir.path().join("eval.csv").display()
    );
    let cfg = write_config(dir.path(), "smoke.cfg", &body);
    let out = run(&["train", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let model_file = models.join("toric3_joint_r0.1_h4.nndec");
    let model = MlpDecoderNet::load(&model_file).unwrap();
    assert_eq!(model.net.dims(), vec![18, 72, 72, 72, 72, 36]);
    assert_eq!(model.samples_seen, 512_000);
    let marginals = model.marginals(&syndromic::gf2::BitVec::zeros(18)).unwrap();
    assert!(marginals.iter().all(|p| (0.0..=1.0).contains(p)));
    let log = fs::read_to_string(model_file.with_extension("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 5);

    let out = run(&["evaluate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("eval.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0.1,neural,joint,200,"));

    // a joint model cannot serve a z_only request
    let out = run(&[
        "evaluate",
        "--config",
        &cfg,
        "--mode",
        "z_only",
        "--decoder",
        "neural",
        "--reuse-model",
        model_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_without_values_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", "lattice = 3\nsweep_axis = max_iter\n");
    assert_eq!(run(&["sweep", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(
        dir.path(),
        "s2.cfg",
        "lattice = 3\nsweep_axis = max_iter\nsweep_values = 1, zero\n",
    );
    assert_eq!(run(&["sweep", "--config", &cfg]).status.code(), Some(2));
}
