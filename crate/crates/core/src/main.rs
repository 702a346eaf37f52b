use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use handsynth::bench::{self, ExperimentConfig, Technique};
use handsynth::dataset::{load_idx, write_contact_sheet, Provenance};
use handsynth::{Error, Result};

#[derive(Parser)]
#[command(name = "handsynth", version, about = "Handwriting data synthesis benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    technique: Option<Technique>,
    /// Comma-separated training-set sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = self.technique {
            cfg.technique = t;
        }
        if let Some(s) = &self.sizes {
            cfg.target_sizes = s.clone();
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize, train and evaluate every cell of the grid.
    Run(RunArgs),
    /// Build each cell's training set.
    Synth(RunArgs),
    /// Train one model per cell from the synthesized sets.
    Train(RunArgs),
    /// Evaluate the trained models and write report.csv / report.json.
    Eval(RunArgs),
    /// Merge report CSVs into one table keyed by (technique, size).
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Tile images from an IDX pair into a PNG contact sheet.
    Inspect {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        cols: usize,
        #[arg(long, default_value_t = 60)]
        limit: usize,
        /// Only show this digit class.
        #[arg(long)]
        label: Option<u8>,
    },
}

fn print_rows(rows: &[bench::ReportRow]) {
    println!("{}", bench::CSV_HEADER.join(","));
    for r in rows {
        println!(
            "{},{},{},{:.2},{:.3},{:.4}",
            r.technique, r.target_size, r.achieved_size, r.error_percent, r.train_seconds, r.synth_accept_rate
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => print_rows(&bench::run_experiment(&a.resolve()?)?.rows),
        Command::Synth(a) => bench::run_synth(&a.resolve()?)?,
        Command::Train(a) => bench::run_train(&a.resolve()?)?,
        Command::Eval(a) => print_rows(&bench::run_eval(&a.resolve()?)?.rows),
        Command::Report { out, inputs } => {
            let rows = bench::merge_csv_reports(&inputs)?;
            bench::write_csv_report(&rows, &out)?;
            print_rows(&rows);
        }
        Command::Inspect {
            images,
            labels,
            out,
            cols,
            limit,
            label,
        } => {
            let set = load_idx(images, labels, Provenance::Synthetic)?;
            let idx: Vec<usize> = (0..set.len())
                .filter(|&i| label.is_none_or(|l| set.labels()[i] == l))
                .take(limit)
                .collect();
            if idx.is_empty() {
                return Err(Error::Argument("no images match".into()));
            }
            write_contact_sheet(&set.subset(&idx), &out, cols)?;
            println!("wrote {} tiles to {}", idx.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
