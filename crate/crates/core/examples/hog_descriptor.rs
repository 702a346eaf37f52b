//! Computes the HOG descriptor of one MNIST digit and prints the dominant
//! orientation bin of every cell.
//!
//! ```bash
//! cargo run --release --example hog_descriptor -- data/mnist 0
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::dataset::{load_idx, Provenance};
use handsynth::hog::{cell_histograms, hog, HogParams};

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

    let params = HogParams::default();
    let desc = hog(img, &params)?;
    let norm = desc.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("digit {label}: descriptor length {}, L2 norm {norm:.3}", desc.len());

    let cells = cell_histograms(img, &params)?;
    let degrees = 180.0 / params.bins as f64;
    println!("dominant orientation per cell (degrees, '.' = no gradient):");
    for cy in 0..cells.cells_y {
        let row: Vec<String> = (0..cells.cells_x)
            .map(|cx| {
                let h = cells.cell(cx, cy);
                let (bin, mass) = h
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
                if mass == 0.0 {
                    "   .".to_string()
                } else {
                    format!("{:4.0}", bin as f64 * degrees)
                }
            })
            .collect();
        println!("{}", row.join(""));
    }
    Ok(())
}
