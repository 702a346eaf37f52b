mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use handsynth::bench::{
    run_eval, run_experiment, run_synth, run_train, ExperimentConfig, Technique, MODEL_FILE,
    REPORT_CSV, REPORT_JSON, SHEET_FILE, TRAIN_IMAGES,
};
use handsynth::dataset::write_idx;
use handsynth::svm::SvmParams;

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let train = common::synthetic_digits(20, 1);
    let test = common::synthetic_digits(5, 1);
    write_idx(&train, root.join("train-img"), root.join("train-lbl")).unwrap();
    write_idx(&test, root.join("test-img"), root.join("test-lbl")).unwrap();
    Fixture { _dir: dir, root }
}

fn config(root: &Path, out: &str, technique: Technique) -> ExperimentConfig {
    ExperimentConfig {
        train_images: root.join("train-img"),
        train_labels: root.join("train-lbl"),
        test_images: root.join("test-img"),
        test_labels: root.join("test-lbl"),
        out_dir: root.join(out),
        seed_count: 100,
        technique,
        target_sizes: vec![200, 300],
        svm: SvmParams {
            epochs: 3,
            ..Default::default()
        },
        contact_sheet: 10,
        record_timings: false,
        ..Default::default()
    }
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    fs::read(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn staged_run_matches_one_shot_run() {
    let f = fixture();
    let staged = config(&f.root, "staged", Technique::Crossover);
    run_synth(&staged).unwrap();
    run_train(&staged).unwrap();
    let a = run_eval(&staged).unwrap();
    let whole = config(&f.root, "whole", Technique::Crossover);
    let b = run_experiment(&whole).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(read(staged.out_dir.join(REPORT_CSV)), read(whole.out_dir.join(REPORT_CSV)));
    for size in [200, 300] {
        for file in [TRAIN_IMAGES, MODEL_FILE] {
            assert_eq!(read(staged.cell_dir(size).join(file)), read(whole.cell_dir(size).join(file)));
        }
        assert!(read(staged.cell_dir(size).join(SHEET_FILE)).starts_with(b"\x89PNG"));
    }
}

#[test]
fn untimed_reruns_are_byte_identical() {
    let f = fixture();
    let cfg = config(&f.root, "again", Technique::Tangent);
    run_experiment(&cfg).unwrap();
    let csv = read(cfg.out_dir.join(REPORT_CSV));
    let json = read(cfg.out_dir.join(REPORT_JSON));
    run_experiment(&cfg).unwrap();
    assert_eq!(csv, read(cfg.out_dir.join(REPORT_CSV)));
    assert_eq!(json, read(cfg.out_dir.join(REPORT_JSON)));
}

#[test]
fn seed_only_cell_uses_the_seed_set() {
    let f = fixture();
    let report = run_experiment(&config(&f.root, "none", Technique::None)).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].achieved_size, 100);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_handsynth"))
}

fn write_config(root: &Path, cfg: &ExperimentConfig) -> PathBuf {
    let path = root.join(format!("{}.json", cfg.technique));
    fs::write(&path, cfg.to_json()).unwrap();
    path
}

#[test]
fn cli_stages_report_and_inspect() {
    let f = fixture();
    let cross = write_config(&f.root, &config(&f.root, "cli", Technique::Crossover));
    let tangent = write_config(&f.root, &config(&f.root, "cli-t", Technique::Tangent));

    let out = cli().args(["eval", "--config"]).arg(&cross).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("handsynth train"));

    for stage in ["synth", "train", "eval"] {
        let out = cli().args([stage, "--config"]).arg(&cross).args(["--sizes", "200"]).output().unwrap();
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = cli().args(["run", "--config"]).arg(&tangent).args(["--sizes", "200"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("technique,target-size"));

    let merged = f.root.join("merged.csv");
    let out = cli()
        .args(["report", "--out"])
        .arg(&merged)
        .arg(f.root.join("cli").join(REPORT_CSV))
        .arg(f.root.join("cli-t").join(REPORT_CSV))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(&merged).unwrap();
    let techniques: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(techniques, vec!["tangent", "crossover"]);

    let png = f.root.join("sheet.png");
    let out = cli()
        .args(["inspect", "--images"])
        .arg(f.root.join("train-img"))
        .arg("--labels")
        .arg(f.root.join("train-lbl"))
        .arg("--out")
        .arg(&png)
        .args(["--label", "4", "--limit", "12"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(read(&png).starts_with(b"\x89PNG"));
}

#[test]
fn bad_config_is_rejected_before_work() {
    let f = fixture();
    let path = f.root.join("bad.json");
    fs::write(&path, r#"{"svm": {"c": -1.0}}"#).unwrap();
    let out = cli().args(["synth", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    fs::write(&path, r#"{"no-such-key": 1}"#).unwrap();
    let out = cli().args(["synth", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
}
