use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, SynthMeta, Technique, TrainMeta};
use crate::error::{Error, Result};
use crate::svm::EvalReport;

pub const CSV_HEADER: [&str; 6] = [
    "technique",
    "target-size",
    "achieved-size",
    "error-percent",
    "train-seconds",
    "synth-accept-rate",
];

/// Published error rates (percent) for the MNIST protocol: 1,000 seed
/// characters expanded to each size, plus the full 60,000-image baseline.
pub fn reference_error(technique: Technique, size: usize) -> Option<f64> {
    const SIZES: [usize; 6] = [10_000, 20_000, 30_000, 40_000, 50_000, 60_000];
    const TANGENT: [f64; 6] = [21.42, 16.22, 13.41, 12.15, 12.7, 11.74];
    const CROSSOVER: [f64; 6] = [10.66, 9.42, 9.07, 8.5, 8.35, 8.06];
    match technique {
        Technique::None => (size == 60_000).then_some(16.55),
        Technique::Tangent => SIZES.iter().position(|&s| s == size).map(|i| TANGENT[i]),
        Technique::Crossover => SIZES.iter().position(|&s| s == size).map(|i| CROSSOVER[i]),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReportRow {
    pub technique: Technique,
    pub target_size: usize,
    pub achieved_size: usize,
    pub error_percent: f64,
    pub train_seconds: f64,
    pub synth_accept_rate: f64,
}

impl ReportRow {
    pub fn new(technique: Technique, synth: &SynthMeta, train: &TrainMeta, eval: &EvalReport) -> Self {
        Self {
            technique,
            target_size: synth.target_size,
            achieved_size: synth.achieved_size,
            error_percent: eval.error_percent,
            train_seconds: train.seconds,
            synth_accept_rate: synth.accept_rate,
        }
    }

    pub fn shortfall(&self) -> usize {
        self.target_size.saturating_sub(self.achieved_size)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CellSummary {
    pub row: ReportRow,
    pub shortfall: usize,
    pub reference_error_percent: Option<f64>,
    pub eval: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub cells: Vec<CellSummary>,
    pub eval_seconds: f64,
    /// Cells whose synthesis stopped short of the target.
    pub findings: Vec<String>,
}

impl RunReport {
    pub fn new(
        cfg: &ExperimentConfig,
        rows: Vec<ReportRow>,
        evals: Vec<EvalReport>,
        eval_seconds: f64,
    ) -> Self {
        let mut findings = Vec::new();
        let cells = rows
            .iter()
            .zip(evals)
            .map(|(row, eval)| {
                if row.shortfall() > 0 {
                    findings.push(format!(
                        "{}-{}: synthesized {} of {} samples",
                        row.technique,
                        row.target_size,
                        row.achieved_size,
                        row.target_size
                    ));
                }
                CellSummary {
                    row: row.clone(),
                    shortfall: row.shortfall(),
                    reference_error_percent: reference_error(row.technique, row.target_size),
                    eval,
                }
            })
            .collect();
        if cfg.technique == Technique::Crossover {
            let first = rows.iter().min_by_key(|r| r.target_size);
            let last = rows.iter().max_by_key(|r| r.target_size);
            if let (Some(a), Some(b)) = (first, last) {
                if b.error_percent > a.error_percent {
                    findings.push(format!(
                        "crossover error rose from {:.2}% at {} to {:.2}% at {}",
                        a.error_percent, a.target_size, b.error_percent, b.target_size
                    ));
                }
            }
        }
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            rows,
            cells,
            eval_seconds,
            findings,
        }
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.into(),
        source,
    }
}

pub fn write_csv_report(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(CSV_HEADER).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.technique.as_str().to_string(),
            r.target_size.to_string(),
            r.achieved_size.to_string(),
            format!("{:.2}", r.error_percent),
            format!("{:.3}", r.train_seconds),
            format!("{:.4}", r.synth_accept_rate),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::arg(format!(
            "{}: unexpected report columns {header:?}",
            path.display()
        )));
    }
    let bad = |what: &str| Error::arg(format!("{}: bad {what}", path.display()));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        rows.push(ReportRow {
            technique: rec[0].parse()?,
            target_size: rec[1].parse().map_err(|_| bad("target-size"))?,
            achieved_size: rec[2].parse().map_err(|_| bad("achieved-size"))?,
            error_percent: rec[3].parse().map_err(|_| bad("error-percent"))?,
            train_seconds: rec[4].parse().map_err(|_| bad("train-seconds"))?,
            synth_accept_rate: rec[5].parse().map_err(|_| bad("synth-accept-rate"))?,
        });
    }
    Ok(rows)
}

/// Merges partial reports into one table keyed by `(technique, target-size)`.
/// Later inputs override earlier ones for the same key.
pub fn merge_csv_reports<P: AsRef<Path>>(inputs: &[P]) -> Result<Vec<ReportRow>> {
    let mut merged = BTreeMap::new();
    for p in inputs {
        for row in read_csv_report(p)? {
            merged.insert((row.technique, row.target_size), row);
        }
    }
    Ok(merged.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: Technique, size: usize, err: f64) -> ReportRow {
        ReportRow {
            technique: t,
            target_size: size,
            achieved_size: size,
            error_percent: err,
            train_seconds: 0.0,
            synth_accept_rate: 1.0,
        }
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(reference_error(Technique::Crossover, 60_000), Some(8.06));
        assert_eq!(reference_error(Technique::Tangent, 10_000), Some(21.42));
        assert_eq!(reference_error(Technique::None, 60_000), Some(16.55));
        assert_eq!(reference_error(Technique::None, 1_000), None);
        assert_eq!(reference_error(Technique::Crossover, 5_000), None);
    }

    #[test]
    fn csv_round_trip_and_merge() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_csv_report(
            &[row(Technique::Crossover, 20_000, 9.5), row(Technique::Crossover, 10_000, 11.0)],
            &a,
        )
        .unwrap();
        write_csv_report(
            &[row(Technique::Tangent, 10_000, 13.25), row(Technique::Crossover, 20_000, 9.25)],
            &b,
        )
        .unwrap();
        let text = std::fs::read_to_string(&a).unwrap();
        assert!(text.starts_with(
            "technique,target-size,achieved-size,error-percent,train-seconds,synth-accept-rate\n"
        ));
        let merged = merge_csv_reports(&[&a, &b]).unwrap();
        let keys: Vec<_> = merged.iter().map(|r| (r.technique, r.target_size)).collect();
        assert_eq!(
            keys,
            vec![
                (Technique::Tangent, 10_000),
                (Technique::Crossover, 10_000),
                (Technique::Crossover, 20_000)
            ]
        );
        assert_eq!(merged[2].error_percent, 9.25);
    }
}
