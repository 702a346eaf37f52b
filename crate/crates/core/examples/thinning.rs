//! Binarizes, thins and re-dilates one MNIST digit, printing each stage.
//!
//! ```bash
//! cargo run --release --example thinning -- data/mnist 0
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::dataset::{load_idx, Provenance};
use handsynth::raster::{binarize, count_components, dilate, thin, DEFAULT_THRESHOLD};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let index: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let set = load_idx(
        dir.join("t10k-images-idx3-ubyte"),
        dir.join("t10k-labels-idx1-ubyte"),
        Provenance::MnistTest,
    )?;
    let (img, label) = set.iter().nth(index).ok_or_else(|| handsynth::Error::Argument("index out of range".into()))?;

    let mask = binarize(img, DEFAULT_THRESHOLD);
    let skel = thin(&mask);
    let thick = dilate(skel.image(), 1);
    println!("digit {label}");
    for (name, im) in [("binary", &mask), ("skeleton", skel.image()), ("dilated", &thick)] {
        println!("\n{name}: {} px, {} component(s)", im.count(), count_components(im));
        for row in im.to_ascii() {
            println!("{row}");
        }
    }
    Ok(())
}
