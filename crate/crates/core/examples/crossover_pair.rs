//! Walks one pair of same-class MNIST digits through the crossing-over steps:
//! offset sweep, fragmentation, structure grouping and reproduction.
//!
//! ```bash
//! cargo run --release --example crossover_pair -- data/mnist 3
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::crossover::{
    fragment, group_structures, reproduce, sweep_offsets, Parent, Source, SynthConfig,
};
use handsynth::dataset::{load_idx, Provenance};
use handsynth::raster::BinaryImage;

fn show(title: &str, img: &BinaryImage) {
    println!("{title}");
    for row in img.to_ascii() {
        println!("  {row}");
    }
}

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/mnist", String::as_str));
    let digit: u8 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let set = load_idx(
        dir.join("train-images-idx3-ubyte"),
        dir.join("train-labels-idx1-ubyte"),
        Provenance::MnistTrain,
    )?;
    let cfg = SynthConfig::default();
    let mut pairs = set.iter().enumerate().filter(|(_, (_, l))| *l == digit);

    // Take the first pairs until one yields a sample.
    let (li, (limg, _)) = pairs.next().expect("class present");
    let left = Parent::prepare(li, digit, limg, &cfg);
    for (ri, (rimg, _)) in pairs.take(50) {
        let right = Parent::prepare(ri, digit, rimg, &cfg);
        let sweeps = sweep_offsets(
            &left.skeleton,
            &right.skeleton,
            cfg.sweep_radius,
            cfg.step,
            cfg.min_points,
            cfg.max_cluster_size,
        );
        for points in &sweeps {
            let (Ok(fl), Ok(fr)) = (
                fragment(&left.skeleton, points, Source::L, cfg.erase_radius, cfg.min_fragment_size),
                fragment(&right.skeleton, points, Source::R, cfg.erase_radius, cfg.min_fragment_size),
            ) else {
                continue;
            };
            let (gl, gr) = group_structures(&fl, &fr, points, left.skeleton.image().dims());
            let samples: Vec<_> = gl
                .iter()
                .flat_map(|a| gr.iter().filter(move |b| b.index != a.index).map(move |b| (a, b)))
                .filter_map(|(a, b)| reproduce(a, points, b, &left, &right, &cfg).ok())
                .collect();
            if samples.is_empty() {
                continue;
            }
            println!(
                "pair ({li}, {ri}): {} usable offsets, offset {:?}, crossing points {:?}",
                sweeps.len(),
                points.offset,
                points.points
            );
            println!("fragments: L {}, R {}", fl.len(), fr.len());
            show("L skeleton", left.skeleton.image());
            show("R skeleton", right.skeleton.image());
            for s in &samples {
                let p = s.provenance;
                show(
                    &format!("L{} + points + R{}", p.left_structure, p.right_structure),
                    &s.image,
                );
            }
            return Ok(());
        }
    }
    println!("no pair among the first 50 produced a sample");
    Ok(())
}
