//! CSV and manifest writers.
//!
//! Every table is written as `summary*.csv` with the columns
//! `stage,arm,shots,mean,ci95,calls_mean,calls_ci95,n` and a companion
//! `details*.csv` carrying the error against the known optimum and the number
//! of discarded trials. MaxCut writes one pair per edge probability.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::{Output, Table};

pub const MANIFEST: &str = "manifest.txt";

#[derive(Serialize)]
struct SummaryRecord<'a> {
    stage: usize,
    arm: &'a str,
    shots: String,
    mean: f64,
    ci95: f64,
    calls_mean: f64,
    calls_ci95: f64,
    n: usize,
}

#[derive(Serialize)]
struct DetailRecord<'a> {
    stage: usize,
    arm: &'a str,
    shots: String,
    error_mean: Option<f64>,
    error_ci95: Option<f64>,
    n_discarded: usize,
}

#[derive(Serialize)]
struct EigvecRecord {
    index: usize,
    amplitude: f64,
}

fn write_records<S: Serialize>(path: &Path, records: impl IntoIterator<Item = S>) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in records {
        w.serialize(r)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_summary(path: &Path, table: &Table) -> Result<()> {
    write_records(
        path,
        table.rows.iter().map(|r| SummaryRecord {
            stage: r.stage,
            arm: r.arm.name(),
            shots: r.shots.to_string(),
            mean: r.mean,
            ci95: r.ci95,
            calls_mean: r.calls_mean,
            calls_ci95: r.calls_ci95,
            n: r.n,
        }),
    )
}

pub fn write_details(path: &Path, table: &Table) -> Result<()> {
    write_records(
        path,
        table.rows.iter().map(|r| DetailRecord {
            stage: r.stage,
            arm: r.arm.name(),
            shots: r.shots.to_string(),
            error_mean: r.error_mean,
            error_ci95: r.error_ci95,
            n_discarded: r.n_discarded,
        }),
    )
}

fn write_table(dir: &Path, suffix: &str, table: &Table, files: &mut Vec<PathBuf>) -> Result<()> {
    let summary = dir.join(format!("summary{suffix}.csv"));
    let details = dir.join(format!("details{suffix}.csv"));
    write_summary(&summary, table)?;
    write_details(&details, table)?;
    files.push(summary);
    files.push(details);
    Ok(())
}

/// Writes the output files and the manifest into `cfg.out`; returns the paths written.
pub fn write_output(cfg: &ExperimentConfig, output: &Output) -> Result<Vec<PathBuf>> {
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    match output {
        Output::Single(t) => write_table(dir, "", t, &mut files)?,
        Output::PerP(tables) => {
            for (p, t) in tables {
                write_table(dir, &format!("_p{p}"), t, &mut files)?;
            }
        }
        Output::Eigvecs(vecs) => {
            for (n, v) in vecs {
                let path = dir.join(format!("eigvec_n{n}.csv"));
                write_records(
                    &path,
                    v.iter()
                        .enumerate()
                        .map(|(index, &amplitude)| EigvecRecord { index, amplitude }),
                )?;
                files.push(path);
            }
        }
    }
    let manifest = dir.join(MANIFEST);
    fs::write(&manifest, cfg.manifest())
        .with_context(|| format!("writing {}", manifest.display()))?;
    files.push(manifest);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Arm, SummaryRow};
    use mgvqe::vqe::Shots;

    #[test]
    fn summary_header_and_row_format() {
        let dir = tempfile::tempdir().unwrap();
        let table = Table {
            rows: vec![SummaryRow {
                stage: 4,
                arm: Arm::Multigrid,
                shots: Shots::Count(1000),
                mean: 0.25,
                ci95: 0.0,
                calls_mean: 120.0,
                calls_ci95: 1.5,
                n: 10,
                n_discarded: 0,
                error_mean: Some(0.01),
                error_ci95: None,
            }],
        };
        let path = dir.path().join("s.csv");
        write_summary(&path, &table).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "stage,arm,shots,mean,ci95,calls_mean,calls_ci95,n\n4,multigrid,1000,0.25,0.0,120.0,1.5,10\n"
        );
        write_details(&path, &table).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "stage,arm,shots,error_mean,error_ci95,n_discarded\n4,multigrid,1000,0.01,,0\n"
        );
    }
}
