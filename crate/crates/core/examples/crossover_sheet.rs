//! Synthesizes crossing-over samples for one digit class from MNIST seeds and
//! writes them, with their parents, as contact sheets.
//!
//! ```bash
//! cargo run --release --example crossover_sheet -- data/mnist 3 out/
//! ```

use std::env;
use std::fs;
use std::path::PathBuf;

use handsynth::crossover::{synthesize_dataset, SynthConfig};
use handsynth::dataset::{load_idx, select_seed, write_contact_sheet, Provenance};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let digit: u8 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let out = PathBuf::from(args.get(3).map_or("runs/sheets", String::as_str));
    fs::create_dir_all(&out).map_err(|e| handsynth::Error::Io { path: out.clone(), source: e })?;

    let train = load_idx(
        dir.join("train-images-idx3-ubyte"),
        dir.join("train-labels-idx1-ubyte"),
        Provenance::MnistTrain,
    )?;
    let seed = select_seed(&train, 1000, 42)?;
    let members: Vec<usize> = (0..seed.len()).filter(|&i| seed.labels()[i] == digit).collect();
    let class_seed = seed.subset(&members);

    let synth = synthesize_dataset(&class_seed, 60, &SynthConfig::default(), 7)?;
    println!("{:#?}", synth.stats);
    for (p, s) in synth.samples.iter().take(5).zip(0..) {
        println!("sample {s}: {p:?}");
    }
    write_contact_sheet(&synth.set, out.join(format!("crossover-{digit}.png")), 10)?;
    let first: Vec<usize> = (0..class_seed.len().min(60)).collect();
    write_contact_sheet(&class_seed.subset(&first), out.join(format!("seeds-{digit}.png")), 10)?;
    println!("wrote sheets to {}", out.display());
    Ok(())
}
