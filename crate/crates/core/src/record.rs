//! Experiment record persistence: CSV emission for metrics, selections,
//! scores, curves and profiles, plus checkpoint files, and the readers the
//! profile aggregator needs.
//!
//! Floats are written with the shortest round-trip representation, so a
//! rerun of the same config produces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{DiagnosticReport, MetricsRecord, PerformanceProfile, RatioCurve};
use crate::error::{Error, Result};
use crate::experiment::ExperimentResult;
use crate::mcdue::AcquisitionScore;
use crate::nn::save_checkpoint;

pub const METRICS_HEADER: [&str; 7] = [
    "strategy",
    "replicate",
    "iteration",
    "labeled_size",
    "rmse",
    "mae",
    "maxae",
];

pub const SELECTIONS_HEADER: [&str; 5] =
    ["strategy", "replicate", "iteration", "dataset_index", "score"];

pub const QTABLE_HEADER: [&str; 3] = ["problem", "algorithm", "error"];

/// `metrics.csv`: one row per (strategy, replicate, iteration).
pub fn write_metrics_csv(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRICS_HEADER)?;
    for run in &result.runs {
        for rec in &run.history {
            w.write_record([
                run.strategy.to_string(),
                run.replicate.to_string(),
                rec.iteration.to_string(),
                rec.labeled_size.to_string(),
                rec.rmse.to_string(),
                rec.mae.to_string(),
                rec.maxae.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `selections.csv`: one row per annotated point; the score column is empty
/// for strategies without a per-point score.
pub fn write_selections_csv(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SELECTIONS_HEADER)?;
    for run in &result.runs {
        for sel in &run.selections {
            w.write_record([
                run.strategy.to_string(),
                run.replicate.to_string(),
                sel.iteration.to_string(),
                sel.dataset_index.to_string(),
                sel.score.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `timings.csv`: wall time per run. Kept out of `metrics.csv` so metrics
/// stay byte-reproducible.
pub fn write_timings_csv(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["strategy", "replicate", "seconds"])?;
    for run in &result.runs {
        w.write_record([
            run.strategy.to_string(),
            run.replicate.to_string(),
            format!("{:.3}", run.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Final per-run networks under `dir/`, named by strategy and replicate.
pub fn write_checkpoints(dir: &Path, result: &ExperimentResult, standardized_targets: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for run in &result.runs {
        let path = dir.join(format!("{}_r{}.json", run.strategy, run.replicate));
        save_checkpoint(&path, &run.network, Some(&run.standardizer), standardized_targets)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Acquisition scores as `pool_index,score`.
pub fn write_scores_csv(path: &Path, scores: &[AcquisitionScore]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["pool_index", "score"])?;
    for s in scores {
        w.write_record([s.pool_index.to_string(), s.score.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ratio_csv(path: &Path, curve: &RatioCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["labeled_size", "mean_ratio", "std_ratio"])?;
    for p in &curve.points {
        w.write_record([
            p.labeled_size.to_string(),
            p.mean.to_string(),
            p.std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `tau` plus one rho column per algorithm.
pub fn write_profile_csv(path: &Path, profile: &PerformanceProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["tau".to_string()];
    header.extend(profile.curves.iter().map(|c| c.algorithm.clone()));
    w.write_record(&header)?;
    for (i, tau) in profile.tau.iter().enumerate() {
        let mut row = vec![tau.to_string()];
        row.extend(profile.curves.iter().map(|c| c.rho[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_auc_csv(path: &Path, profile: &PerformanceProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "auc"])?;
    for c in &profile.curves {
        w.write_record([c.algorithm.clone(), c.auc.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostic_csv(path: &Path, report: &DiagnosticReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["mc_std", "abs_error"])?;
    for (s, e) in &report.points {
        w.write_record([s.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One `metrics.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub strategy: String,
    pub replicate: usize,
    pub record: MetricsRecord,
}

fn parse_field<T: std::str::FromStr>(row: &csv::StringRecord, idx: usize, what: &str) -> Result<T> {
    row.get(idx)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Config(format!("bad {what} in metrics row {row:?}")))
}

/// Read a `metrics.csv` produced by [`write_metrics_csv`].
pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().ne(METRICS_HEADER) {
        return Err(Error::Config(format!(
            "{} does not look like a metrics file (header {:?})",
            path.display(),
            headers
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(MetricsRow {
            strategy: record
                .get(0)
                .ok_or_else(|| Error::Config("missing strategy".into()))?
                .to_string(),
            replicate: parse_field(&record, 1, "replicate")?,
            record: MetricsRecord {
                iteration: parse_field(&record, 2, "iteration")?,
                labeled_size: parse_field(&record, 3, "labeled_size")?,
                rmse: parse_field(&record, 4, "rmse")?,
                mae: parse_field(&record, 5, "mae")?,
                maxae: parse_field(&record, 6, "maxae")?,
            },
        });
    }
    Ok(rows)
}

/// Read a `problem,algorithm,error` table.
pub fn read_qtable_csv(path: &Path) -> Result<Vec<(String, String, f64)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().ne(QTABLE_HEADER) {
        return Err(Error::Config(format!(
            "{} does not look like a q-table file (header {:?})",
            path.display(),
            headers
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let problem = record
            .get(0)
            .ok_or_else(|| Error::Config("missing problem".into()))?
            .to_string();
        let algorithm = record
            .get(1)
            .ok_or_else(|| Error::Config("missing algorithm".into()))?
            .to_string();
        let error: f64 = parse_field(&record, 2, "error")?;
        rows.push((problem, algorithm, error));
    }
    Ok(rows)
}

/// Sniff whether a CSV file is a metrics file or a q-table by its header.
pub enum ResultFileKind {
    Metrics,
    QTable,
}

pub fn sniff_result_file(path: &Path) -> Result<ResultFileKind> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().eq(METRICS_HEADER) {
        Ok(ResultFileKind::Metrics)
    } else if headers.iter().eq(QTABLE_HEADER) {
        Ok(ResultFileKind::QTable)
    } else {
        Err(Error::Config(format!(
            "{}: unrecognized result header {:?}",
            path.display(),
            headers
        )))
    }
}
