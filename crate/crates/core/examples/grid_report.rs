//! Runs one technique over a grid of training-set sizes through the staged
//! pipeline (synth, train, eval) and prints the report rows next to the
//! published reference errors.
//!
//! ```bash
//! cargo run --release --example grid_report -- crossover 10000,20000 runs/grid
//! ```

use std::env;
use std::path::PathBuf;

use handsynth::bench::{run_eval, run_synth, run_train, ExperimentConfig, Technique};

fn main() -> handsynth::Result<()> {
    let args: Vec<String> = env::args().collect();
    let technique: Technique = args.get(1).map_or("crossover", String::as_str).parse()?;
    let sizes = args
        .get(2)
        .map_or("10000", String::as_str)
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| handsynth::Error::Argument(format!("bad size {s:?}"))))
        .collect::<handsynth::Result<Vec<usize>>>()?;
    let cfg = ExperimentConfig {
        technique,
        target_sizes: sizes,
        out_dir: PathBuf::from(args.get(3).map_or("runs/grid", String::as_str)),
        ..Default::default()
    };
    run_synth(&cfg)?;
    run_train(&cfg)?;
    let report = run_eval(&cfg)?;
    println!("technique  size     achieved  error%  published%");
    for cell in &report.cells {
        let r = &cell.row;
        let published = cell
            .reference_error_percent
            .map_or("-".to_string(), |v| format!("{v:.2}"));
        println!(
            "{:<10} {:>7} {:>9} {:>7.2} {:>10}",
            r.technique.as_str(),
            r.target_size,
            r.achieved_size,
            r.error_percent,
            published
        );
    }
    for f in &report.findings {
        println!("finding: {f}");
    }
    println!("reports in {}", cfg.out_dir.display());
    Ok(())
}
