//! Experiment runner: seed selection, synthesis, training, evaluation and
//! reporting, one grid cell per `(technique, training-set size)`.
//!
//! Each stage persists its output under `out_dir/<technique>-<size>/` and the
//! next stage reads it back, so `synth`, `train` and `eval` can be run one at
//! a time and give exactly what [`run_experiment`] gives.

mod config;
mod report;

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, FeatureConfig, StrokeNormalization, Technique};
pub use report::{
    merge_csv_reports, read_csv_report, reference_error, write_csv_report, ReportRow, RunReport,
    CSV_HEADER,
};

use crate::crossover::{synthesize_dataset, SynthStats};
use crate::dataset::{
    load_idx, select_seed, write_contact_sheet, write_idx, GrayImage, LabeledSet, Provenance,
};
use crate::error::{Error, Result};
use crate::hog::hog;
use crate::raster::{binarize, dilate, thin};
use crate::svm::{evaluate_features, train_ova, EvalReport, LinearModel};
use crate::tangent::sample_tangent_dataset;

pub const TRAIN_IMAGES: &str = "train-images.idx";
pub const TRAIN_LABELS: &str = "train-labels.idx";
pub const SYNTH_META: &str = "synth.json";
pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_META: &str = "train.json";
pub const EVAL_FILE: &str = "eval.json";
pub const SHEET_FILE: &str = "sheet.png";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const CONFIG_ECHO: &str = "config.json";

/// Derives an independent stream seed from the run seed and a tag.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SynthMeta {
    pub technique: Technique,
    pub target_size: usize,
    pub achieved_size: usize,
    pub accept_rate: f64,
    pub seconds: f64,
    pub crossover: Option<SynthStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainMeta {
    pub samples: usize,
    pub seconds: f64,
}

fn elapsed(cfg: &ExperimentConfig, start: Instant) -> f64 {
    if cfg.record_timings {
        (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0
    } else {
        0.0
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, stage: &str) -> Result<T> {
    if !path.is_file() {
        return Err(Error::MissingInput {
            path: path.into(),
            hint: format!("run `handsynth {stage}` first"),
        });
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}

/// The feature vector the classifier sees for one image.
pub fn featurize(img: &GrayImage, features: &FeatureConfig) -> Result<Vec<f64>> {
    let prepared;
    let input = match features.normalization {
        StrokeNormalization::Raw => img,
        StrokeNormalization::Skeleton => {
            let sk = thin(&binarize(img, features.threshold));
            prepared = dilate(sk.image(), features.dilate_iters).to_gray();
            &prepared
        }
    };
    Ok(hog(input, &features.hog)?.into_vec())
}

pub fn featurize_set(set: &LabeledSet, features: &FeatureConfig) -> Result<Vec<Vec<f64>>> {
    set.images()
        .par_iter()
        .map(|im| featurize(im, features))
        .collect()
}

pub fn load_train(cfg: &ExperimentConfig) -> Result<LabeledSet> {
    load_idx(&cfg.train_images, &cfg.train_labels, Provenance::MnistTrain)
}

pub fn load_test(cfg: &ExperimentConfig) -> Result<LabeledSet> {
    load_idx(&cfg.test_images, &cfg.test_labels, Provenance::MnistTest)
}

pub fn select_seed_set(cfg: &ExperimentConfig, train: &LabeledSet) -> Result<LabeledSet> {
    select_seed(train, cfg.seed_count, derive_seed(cfg.rng_seed, 0))
}

/// Builds the training set of one grid cell from the seed set.
pub fn synthesize_cell(
    cfg: &ExperimentConfig,
    seed: &LabeledSet,
    size: usize,
) -> Result<(LabeledSet, SynthMeta)> {
    let start = Instant::now();
    let stream = derive_seed(cfg.rng_seed, size as u64);
    let (set, crossover) = match cfg.technique {
        Technique::None => (seed.clone(), None),
        Technique::Tangent => (sample_tangent_dataset(seed, size, &cfg.tangent, stream)?, None),
        Technique::Crossover => {
            let out = synthesize_dataset(seed, size, &cfg.synth, stream)?;
            (out.set, Some(out.stats))
        }
    };
    let meta = SynthMeta {
        technique: cfg.technique,
        target_size: size,
        achieved_size: set.len(),
        accept_rate: crossover.as_ref().map_or(1.0, SynthStats::accept_rate),
        seconds: elapsed(cfg, start),
        crossover,
    };
    Ok((set, meta))
}

pub fn train_cell(cfg: &ExperimentConfig, set: &LabeledSet) -> Result<(LinearModel, TrainMeta)> {
    let start = Instant::now();
    let features = featurize_set(set, &cfg.features)?;
    let model = train_ova(&features, set.labels(), &cfg.svm)?;
    let meta = TrainMeta {
        samples: set.len(),
        seconds: elapsed(cfg, start),
    };
    Ok((model, meta))
}

/// Stage 1: writes each cell's training set, synthesis stats and (optionally)
/// a contact sheet.
pub fn run_synth(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    cfg.check_inputs()?;
    let train = load_train(cfg)?;
    if cfg.seed_count > train.len() {
        return Err(Error::Config(format!(
            "seed-count {} exceeds the {} training images",
            cfg.seed_count,
            train.len()
        )));
    }
    let seed = select_seed_set(cfg, &train)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    write_json(&cfg.out_dir.join(CONFIG_ECHO), cfg)?;
    for size in cfg.cells() {
        let dir = cfg.cell_dir(size);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let (set, meta) = synthesize_cell(cfg, &seed, size)?;
        write_idx(&set, dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS))?;
        write_json(&dir.join(SYNTH_META), &meta)?;
        if cfg.contact_sheet > 0 && !set.is_empty() {
            let n = cfg.contact_sheet.min(set.len());
            let idx: Vec<usize> = (0..n).collect();
            write_contact_sheet(&set.subset(&idx), dir.join(SHEET_FILE), 10)?;
        }
    }
    Ok(())
}

fn load_cell_set(cfg: &ExperimentConfig, size: usize) -> Result<LabeledSet> {
    let dir = cfg.cell_dir(size);
    let (images, labels) = (dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS));
    for p in [&images, &labels] {
        if !p.is_file() {
            return Err(Error::MissingInput {
                path: p.clone(),
                hint: "run `handsynth synth` first".into(),
            });
        }
    }
    load_idx(images, labels, Provenance::Synthetic)
}

/// Stage 2: trains one model per cell from the persisted training sets.
pub fn run_train(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    for size in cfg.cells() {
        let set = load_cell_set(cfg, size)?;
        let dir = cfg.cell_dir(size);
        let (model, meta) = train_cell(cfg, &set)?;
        model.save(dir.join(MODEL_FILE))?;
        write_json(&dir.join(TRAIN_META), &meta)?;
    }
    Ok(())
}

/// Stage 3: evaluates every cell's model on the test set and writes the
/// CSV and JSON reports.
pub fn run_eval(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut pending = Vec::new();
    for size in cfg.cells() {
        let dir = cfg.cell_dir(size);
        let model_path = dir.join(MODEL_FILE);
        if !model_path.is_file() {
            return Err(Error::MissingInput {
                path: model_path,
                hint: "run `handsynth train` first".into(),
            });
        }
        let synth: SynthMeta = read_json(&dir.join(SYNTH_META), "synth")?;
        let train: TrainMeta = read_json(&dir.join(TRAIN_META), "train")?;
        pending.push((size, model_path, synth, train));
    }
    cfg.check_inputs()?;
    let start = Instant::now();
    let test = load_test(cfg)?;
    let test_features = featurize_set(&test, &cfg.features)?;
    let mut rows = Vec::new();
    let mut evals = Vec::new();
    for (size, model_path, synth, train) in pending {
        let model = LinearModel::load(&model_path)?;
        let eval = evaluate_features(&model, &test_features, test.labels())?;
        write_json(&cfg.cell_dir(size).join(EVAL_FILE), &eval)?;
        rows.push(ReportRow::new(cfg.technique, &synth, &train, &eval));
        evals.push(eval);
    }
    let report = RunReport::new(cfg, rows, evals, elapsed(cfg, start));
    write_csv_report(&report.rows, cfg.out_dir.join(REPORT_CSV))?;
    write_json(&cfg.out_dir.join(REPORT_JSON), &report)?;
    Ok(report)
}

/// Full pipeline for one technique over its grid of training-set sizes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    cfg.check_inputs()?;
    run_synth(cfg)?;
    run_train(cfg)?;
    run_eval(cfg)
}

/// Evaluation without touching the filesystem, for callers holding data in memory.
pub fn train_and_evaluate(
    cfg: &ExperimentConfig,
    train: &LabeledSet,
    test_features: &[Vec<f64>],
    test_labels: &[u8],
) -> Result<EvalReport> {
    let (model, _) = train_cell(cfg, train)?;
    evaluate_features(&model, test_features, test_labels)
}
