//! Desk-scale version of the benchmark: 1,000 stratified MNIST seeds, one
//! synthesized training set per technique, scored on the 10,000 test images.
//!
//! ```bash
//! cargo run --release --example desk_protocol -- data/mnist 10000
//! ```

use std::env;
use std::path::PathBuf;
use std::time::Instant;

use handsynth::bench::{
    featurize_set, load_test, load_train, select_seed_set, synthesize_cell, train_and_evaluate,
    ExperimentConfig, Technique,
};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let size: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let base = ExperimentConfig {
        train_images: dir.join("train-images-idx3-ubyte"),
        train_labels: dir.join("train-labels-idx1-ubyte"),
        test_images: dir.join("t10k-images-idx3-ubyte"),
        test_labels: dir.join("t10k-labels-idx1-ubyte"),
        ..Default::default()
    };
    base.check_inputs()?;
    let train = load_train(&base)?;
    let test = load_test(&base)?;
    let seed = select_seed_set(&base, &train)?;
    let test_features = featurize_set(&test, &base.features)?;

    println!("technique  size    error%  accept  seconds");
    for technique in [Technique::None, Technique::Tangent, Technique::Crossover] {
        let cfg = ExperimentConfig {
            technique,
            ..base.clone()
        };
        let start = Instant::now();
        let size = if technique == Technique::None { seed.len() } else { size };
        let (set, meta) = synthesize_cell(&cfg, &seed, size)?;
        let eval = train_and_evaluate(&cfg, &set, &test_features, test.labels())?;
        println!(
            "{:<10} {:>6} {:>8.2} {:>7.3} {:>8.1}",
            technique.as_str(),
            set.len(),
            eval.error_percent,
            meta.accept_rate,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
