use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crossover::SynthConfig;
use crate::error::{Error, Result};
use crate::hog::HogParams;
use crate::raster::DEFAULT_THRESHOLD;
use crate::svm::SvmParams;
use crate::tangent::TangentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technique {
    None,
    Tangent,
    Crossover,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::None => "none",
            Technique::Tangent => "tangent",
            Technique::Crossover => "crossover",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Technique::None),
            "tangent" => Ok(Technique::Tangent),
            "crossover" => Ok(Technique::Crossover),
            other => Err(Error::Config(format!(
                "unknown technique {other:?} (expected crossover, tangent or none)"
            ))),
        }
    }
}

/// How images are turned into HOG inputs, for training and test alike.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrokeNormalization {
    /// HOG straight on the gray image.
    Raw,
    /// Binarize, thin, dilate, then HOG on the 0/255 mask. Crossing-over
    /// output already has this form, so the step puts every training and test
    /// image into the same stroke style.
    Skeleton,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub normalization: StrokeNormalization,
    pub threshold: u8,
    pub dilate_iters: usize,
    pub hog: HogParams,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            normalization: StrokeNormalization::Skeleton,
            threshold: DEFAULT_THRESHOLD,
            dilate_iters: 1,
            hog: HogParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
    pub out_dir: PathBuf,
    pub seed_count: usize,
    pub technique: Technique,
    /// Ignored for `technique = none`, which trains on the seed set itself.
    pub target_sizes: Vec<usize>,
    pub rng_seed: u64,
    pub synth: SynthConfig,
    pub tangent: TangentConfig,
    pub features: FeatureConfig,
    pub svm: SvmParams,
    /// Tiles written to each cell's contact sheet; 0 disables sheets.
    pub contact_sheet: usize,
    /// When false, every timing field is written as 0 so reports are
    /// byte-identical across runs.
    pub record_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mnist = PathBuf::from("data/mnist");
        Self {
            train_images: mnist.join("train-images-idx3-ubyte"),
            train_labels: mnist.join("train-labels-idx1-ubyte"),
            test_images: mnist.join("t10k-images-idx3-ubyte"),
            test_labels: mnist.join("t10k-labels-idx1-ubyte"),
            out_dir: PathBuf::from("runs/default"),
            seed_count: 1000,
            technique: Technique::Crossover,
            target_sizes: (1..=6).map(|k| k * 10_000).collect(),
            rng_seed: 42,
            synth: SynthConfig::default(),
            tangent: TangentConfig::default(),
            features: FeatureConfig::default(),
            svm: SvmParams::default(),
            contact_sheet: 60,
            record_timings: true,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that can be checked without loading data.
    pub fn validate(&self) -> Result<()> {
        if self.seed_count == 0 {
            return Err(Error::Config("seed-count must be > 0".into()));
        }
        if self.technique != Technique::None {
            if self.target_sizes.is_empty() {
                return Err(Error::Config("target-sizes is empty".into()));
            }
            if self.target_sizes.contains(&0) {
                return Err(Error::Config("target sizes must be > 0".into()));
            }
        }
        self.synth.validate()?;
        self.tangent.validate()?;
        self.features.hog.validate()?;
        self.svm.validate()
    }

    pub fn check_inputs(&self) -> Result<()> {
        for (path, what) in [
            (&self.train_images, "training images"),
            (&self.train_labels, "training labels"),
            (&self.test_images, "test images"),
            (&self.test_labels, "test labels"),
        ] {
            if !path.is_file() {
                return Err(Error::MissingInput {
                    path: path.clone(),
                    hint: format!("{what} IDX file not found; point the config at MNIST"),
                });
            }
        }
        Ok(())
    }

    /// Training-set sizes this config produces, one per report row.
    pub fn cells(&self) -> Vec<usize> {
        match self.technique {
            Technique::None => vec![self.seed_count],
            _ => self.target_sizes.clone(),
        }
    }

    pub fn cell_dir(&self, size: usize) -> PathBuf {
        self.out_dir.join(format!("{}-{size}", self.technique))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_the_table_grid() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.target_sizes, vec![10_000, 20_000, 30_000, 40_000, 50_000, 60_000]);
        assert_eq!(cfg.seed_count, 1000);
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"technique": "tangent", "synth": {"step": 1}}"#).unwrap();
        assert_eq!(cfg.technique, Technique::Tangent);
        assert_eq!(cfg.synth.step, 1);
        assert_eq!(cfg.synth.sweep_radius, 4);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn none_ignores_sizes() {
        let cfg = ExperimentConfig {
            technique: Technique::None,
            target_sizes: vec![],
            seed_count: 60_000,
            ..Default::default()
        };
        cfg.validate().unwrap();
        assert_eq!(cfg.cells(), vec![60_000]);
    }

    #[test]
    fn invalid_values_rejected() {
        let bad = ExperimentConfig {
            target_sizes: vec![10, 0],
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let mut bad = ExperimentConfig::default();
        bad.svm.c = 0.0;
        assert!(bad.validate().is_err());
    }
}
