//! One-vs-all linear SVM trained by stochastic subgradient descent on the
//! primal hinge objective
//!
//! ```text
//! J(w, b) = 1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w . x_i + b))
//! ```
//!
//! Each step uses the per-sample share `w / n + C * dhinge_i` with step size
//! `eta0 / (1 + t * decay)`, `t` counting samples seen. The bias is not
//! regularized.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledSet, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::hog::{hog, HogParams};

pub const MODEL_MAGIC: &str = "handsynth-linear-ova";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub epochs: usize,
    pub eta0: f64,
    pub decay: f64,
    pub shuffle_seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 20,
            eta0: 0.1,
            decay: 1e-3,
            shuffle_seed: 0,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("SVM C must be > 0, got {}", self.c)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("SVM epochs must be >= 1".into()));
        }
        if self.eta0.is_nan() || self.eta0 <= 0.0 || self.decay.is_nan() || self.decay < 0.0 {
            return Err(Error::Config("SVM learning rate must be positive".into()));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `J(w, b)` over a binary problem with `ys` in `{-1, +1}`.
pub fn hinge_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    let reg = 0.5 * dot(w, w);
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
        .sum();
    reg + c * loss
}

/// A subgradient of [`hinge_objective`]; exact wherever no margin equals 1.
pub fn hinge_subgradient(
    w: &[f64],
    b: f64,
    xs: &[Vec<f64>],
    ys: &[f64],
    c: f64,
) -> (Vec<f64>, f64) {
    let mut gw = w.to_vec();
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        if y * (dot(w, x) + b) < 1.0 {
            for (g, xi) in gw.iter_mut().zip(x) {
                *g -= c * y * xi;
            }
            gb -= c * y;
        }
    }
    (gw, gb)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective after each epoch, when requested.
    pub epoch_objectives: Vec<f64>,
}

/// Trains one binary hinge-loss classifier.
pub fn train_binary(xs: &[Vec<f64>], ys: &[f64], params: &SvmParams, track: bool) -> BinaryFit {
    let n = xs.len();
    let dim = xs.first().map_or(0, Vec::len);
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.shuffle_seed);
    let mut t = 0usize;
    let inv_n = 1.0 / n.max(1) as f64;
    let mut epoch_objectives = Vec::new();
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = params.eta0 / (1.0 + t as f64 * params.decay);
            let (x, y) = (&xs[i], ys[i]);
            let violated = y * (dot(&w, x) + b) < 1.0;
            let shrink = 1.0 - eta * inv_n;
            if violated {
                let step = eta * params.c * y;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj = *wj * shrink + step * xj;
                }
                b += step;
            } else {
                w.iter_mut().for_each(|wj| *wj *= shrink);
            }
            t += 1;
        }
        if track {
            epoch_objectives.push(hinge_objective(&w, b, xs, ys, params.c));
        }
    }
    BinaryFit {
        weights: w,
        bias: b,
        epoch_objectives,
    }
}

/// Ten per-class score functions `w_c . x + b_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub magic: String,
    pub version: u32,
    pub classes: usize,
    pub dim: usize,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            magic: MODEL_MAGIC.into(),
            version: MODEL_VERSION,
            classes: NUM_CLASSES,
            dim,
            weights: vec![vec![0.0; dim]; NUM_CLASSES],
            biases: vec![0.0; NUM_CLASSES],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.magic != MODEL_MAGIC || self.version != MODEL_VERSION {
            return Err(Error::arg(format!(
                "not a linear model file (magic {:?}, version {})",
                self.magic, self.version
            )));
        }
        if self.classes != NUM_CLASSES
            || self.weights.len() != NUM_CLASSES
            || self.biases.len() != NUM_CLASSES
            || self.weights.iter().any(|w| w.len() != self.dim)
        {
            return Err(Error::arg("linear model shape does not match its header"));
        }
        if self
            .weights
            .iter()
            .flatten()
            .chain(&self.biases)
            .any(|v| !v.is_finite())
        {
            return Err(Error::arg("linear model has non-finite weights"));
        }
        Ok(())
    }

    pub fn scores(&self, x: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        if x.len() != self.dim {
            return Err(Error::arg(format!(
                "feature length {} does not match model dimension {}",
                x.len(),
                self.dim
            )));
        }
        let mut s = [0.0; NUM_CLASSES];
        for (c, si) in s.iter_mut().enumerate() {
            *si = dot(&self.weights[c], x) + self.biases[c];
        }
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: LinearModel = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })?;
        model.validate()?;
        Ok(model)
    }
}

/// Trains the ten one-vs-all problems (in parallel, each deterministic).
pub fn train_ova(features: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<LinearModel> {
    params.validate()?;
    if features.is_empty() {
        return Err(Error::arg("cannot train on an empty set"));
    }
    if features.len() != labels.len() {
        return Err(Error::arg(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::arg("feature vectors differ in length"));
    }
    if let Some((index, &value)) = labels
        .iter()
        .enumerate()
        .find(|(_, &l)| l as usize >= NUM_CLASSES)
    {
        return Err(Error::LabelValue { index, value });
    }
    let fits: Vec<BinaryFit> = (0..NUM_CLASSES)
        .into_par_iter()
        .map(|c| {
            let ys: Vec<f64> = labels
                .iter()
                .map(|&l| if l as usize == c { 1.0 } else { -1.0 })
                .collect();
            train_binary(features, &ys, params, false)
        })
        .collect();
    let mut model = LinearModel::zeros(dim);
    for (c, fit) in fits.into_iter().enumerate() {
        model.weights[c] = fit.weights;
        model.biases[c] = fit.bias;
    }
    Ok(model)
}

/// Highest-scoring class; ties go to the lowest index.
pub fn predict(model: &LinearModel, x: &[f64]) -> Result<u8> {
    let s = model.scores(x)?;
    let mut best = 0;
    for c in 1..NUM_CLASSES {
        if s[c] > s[best] {
            best = c;
        }
    }
    Ok(best as u8)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvalReport {
    pub error_percent: f64,
    /// `confusion[true][predicted]`.
    pub confusion: [[usize; NUM_CLASSES]; NUM_CLASSES],
    pub total: usize,
    pub errors: usize,
}

impl EvalReport {
    pub fn from_predictions(truth: &[u8], predicted: &[u8]) -> Self {
        let mut confusion = [[0; NUM_CLASSES]; NUM_CLASSES];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t as usize][p as usize] += 1;
        }
        let total = truth.len();
        let correct: usize = (0..NUM_CLASSES).map(|c| confusion[c][c]).sum();
        let errors = total - correct;
        let error_percent = if total == 0 {
            0.0
        } else {
            100.0 * errors as f64 / total as f64
        };
        Self {
            error_percent,
            confusion,
            total,
            errors,
        }
    }
}

/// Scores precomputed feature vectors.
pub fn evaluate_features(model: &LinearModel, features: &[Vec<f64>], labels: &[u8]) -> Result<EvalReport> {
    if features.is_empty() {
        return Err(Error::arg("cannot evaluate on an empty set"));
    }
    let predicted = features
        .par_iter()
        .map(|x| predict(model, x))
        .collect::<Result<Vec<u8>>>()?;
    Ok(EvalReport::from_predictions(labels, &predicted))
}

/// HOG-featurizes `test` and scores it.
pub fn evaluate(model: &LinearModel, test: &LabeledSet, hog_params: &HogParams) -> Result<EvalReport> {
    let features = test
        .images()
        .par_iter()
        .map(|im| hog(im, hog_params).map(|d| d.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    evaluate_features(model, &features, test.labels())
}
