//! Applies each tangent direction to one MNIST digit at -max, 0 and +max and
//! writes the results as a sheet (one row per direction).
//!
//! ```bash
//! cargo run --release --example tangent_variants -- data/mnist 0 tangents.png
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::dataset::{load_idx, write_contact_sheet, LabeledSet, Provenance};
use handsynth::tangent::{apply_tangents, tangent_fields, TangentCoefficients, TangentConfig, TangentKind};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let index: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = PathBuf::from(args.get(3).map_or("tangents.png", String::as_str));
    let set = load_idx(
        dir.join("t10k-images-idx3-ubyte"),
        dir.join("t10k-labels-idx1-ubyte"),
        Provenance::MnistTest,
    )?;
    let (img, label) = set.iter().nth(index).ok_or_else(|| handsynth::Error::Argument("index out of range".into()))?;

    let cfg = TangentConfig::default();
    let fields = tangent_fields(img, cfg.smoothing_sigma)?;
    let limits = cfg.alpha_max.as_array();
    let mut images = Vec::new();
    for kind in TangentKind::ALL {
        let max = limits[kind.index()];
        for alpha in [-max, 0.0, max] {
            images.push(apply_tangents(img, &TangentCoefficients::single(kind, alpha), &fields));
        }
        println!("{kind:?}: alpha in [-{max}, {max}]");
    }
    let labels = vec![label; images.len()];
    write_contact_sheet(&LabeledSet::new(images, labels, Provenance::Synthetic)?, &out, 3)?;
    println!("wrote {}", out.display());
    Ok(())
}
