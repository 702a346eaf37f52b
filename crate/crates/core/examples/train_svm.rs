//! Trains the one-vs-all linear SVM on HOG features of the first N MNIST
//! training images, saves the model and scores it on the test set.
//!
//! ```bash
//! cargo run --release --example train_svm -- data/mnist 5000 model.json
//! ```

use std::env;
use std::path::PathBuf;
use std::time::Instant;

use handsynth::bench::{featurize_set, FeatureConfig};
use handsynth::dataset::{load_idx, Provenance};
use handsynth::svm::{evaluate_features, train_ova, LinearModel, SvmParams};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let out = PathBuf::from(args.get(3).map_or("model.json", String::as_str));

    let train = load_idx(
        dir.join("train-images-idx3-ubyte"),
        dir.join("train-labels-idx1-ubyte"),
        Provenance::MnistTrain,
    )?;
    let test = load_idx(
        dir.join("t10k-images-idx3-ubyte"),
        dir.join("t10k-labels-idx1-ubyte"),
        Provenance::MnistTest,
    )?;
    let first: Vec<usize> = (0..n.min(train.len())).collect();
    let train = train.subset(&first);

    let features = FeatureConfig::default();
    let start = Instant::now();
    let xs = featurize_set(&train, &features)?;
    let model = train_ova(&xs, train.labels(), &SvmParams::default())?;
    println!("trained on {} images in {:.1}s", train.len(), start.elapsed().as_secs_f64());
    model.save(&out)?;

    let model = LinearModel::load(&out)?;
    let report = evaluate_features(&model, &featurize_set(&test, &features)?, test.labels())?;
    println!("test error {:.2}% ({} of {})", report.error_percent, report.errors, report.total);
    println!("confusion (rows = truth):");
    for row in report.confusion {
        println!("{}", row.map(|v| format!("{v:5}")).join(""));
    }
    Ok(())
}
