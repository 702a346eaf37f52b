//! Loads MNIST from IDX files, draws a stratified seed set and writes a
//! contact sheet of it.
//!
//! ```bash
//! cargo run --release --example mnist_seeds -- data/mnist 1000 seeds.png
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::dataset::{load_idx, select_seed, write_contact_sheet, Provenance};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let out = PathBuf::from(args.get(3).map_or("seeds.png", String::as_str));

    let train = load_idx(
        dir.join("train-images-idx3-ubyte"),
        dir.join("train-labels-idx1-ubyte"),
        Provenance::MnistTrain,
    )?;
    println!("train: {} images, {:?}", train.len(), train.dims());
    println!("class counts: {:?}", train.class_counts());

    let seed = select_seed(&train, n, 42)?;
    println!("seed:  {} images, class counts {:?}", seed.len(), seed.class_counts());
    let first: Vec<usize> = (0..seed.len().min(100)).collect();
    write_contact_sheet(&seed.subset(&first), &out, 10)?;
    println!("wrote {}", out.display());
    Ok(())
}
