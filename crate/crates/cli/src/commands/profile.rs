//! `dal profile`: aggregate result files into Dolan-More profiles.
//!
//! Inputs may be run directories (read `<dir>/metrics.csv`), metrics files,
//! or plain `problem,algorithm,error` tables. From a metrics file, each
//! `(file, replicate)` pair becomes one problem whose error is the chosen
//! metric at the final iteration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dal_core::analysis::{dolan_more, MetricKind, ProblemResultTable};
use dal_core::record::{
    self, read_metrics_csv, read_qtable_csv, sniff_result_file, ResultFileKind,
};
use dal_core::plot;

use crate::Failure;

fn source_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// (problem -> algorithm -> error), insertion-ordered by problem name.
type QMap = BTreeMap<String, BTreeMap<String, f64>>;

fn collect(inputs: &[PathBuf], metric: MetricKind) -> Result<QMap, Failure> {
    let mut q: QMap = BTreeMap::new();
    for input in inputs {
        let (path, label) = if input.is_dir() {
            (input.join("metrics.csv"), source_label(input))
        } else {
            (input.clone(), source_label(input))
        };
        if !path.exists() {
            return Err(Failure::Usage(format!("{} does not exist", path.display())));
        }
        let kind = sniff_result_file(&path).map_err(|e| Failure::Usage(e.to_string()))?;
        match kind {
            ResultFileKind::Metrics => {
                let rows = read_metrics_csv(&path).map_err(|e| Failure::Usage(e.to_string()))?;
                // final iteration per (strategy, replicate)
                let mut finals: BTreeMap<(String, usize), (usize, f64)> = BTreeMap::new();
                for row in rows {
                    let key = (row.strategy.clone(), row.replicate);
                    let value = (row.record.iteration, row.record.metric(metric));
                    finals
                        .entry(key)
                        .and_modify(|cur| {
                            if value.0 > cur.0 {
                                *cur = value;
                            }
                        })
                        .or_insert(value);
                }
                for ((strategy, replicate), (_, error)) in finals {
                    q.entry(format!("{label}:r{replicate}"))
                        .or_default()
                        .insert(strategy, error);
                }
            }
            ResultFileKind::QTable => {
                for (problem, algorithm, error) in
                    read_qtable_csv(&path).map_err(|e| Failure::Usage(e.to_string()))?
                {
                    q.entry(problem).or_default().insert(algorithm, error);
                }
            }
        }
    }
    Ok(q)
}

pub fn execute(inputs: &[PathBuf], metric: &str, out: Option<PathBuf>) -> Result<(), Failure> {
    if inputs.is_empty() {
        return Err(Failure::Usage("at least one result input is required".into()));
    }
    let metric: MetricKind = metric.parse().map_err(|e: dal_core::Error| Failure::Usage(e.to_string()))?;
    let q = collect(inputs, metric)?;

    // every problem must cover the same algorithm set
    let problems: Vec<String> = q.keys().cloned().collect();
    let algorithms: Vec<String> = q[&problems[0]].keys().cloned().collect();
    for (problem, row) in &q {
        let this: Vec<String> = row.keys().cloned().collect();
        if this != algorithms {
            return Err(Failure::Usage(format!(
                "inconsistent algorithm sets: problem '{}' has {:?}, problem '{}' has {:?}",
                problems[0], algorithms, problem, this
            )));
        }
    }

    let mut errors = Vec::with_capacity(problems.len() * algorithms.len());
    for p in &problems {
        for a in &algorithms {
            errors.push(q[p][a]);
        }
    }
    let table = ProblemResultTable::new(problems, algorithms, errors)
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let profile = dolan_more(&table, None)?;

    let out_dir = out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;
    record::write_profile_csv(&out_dir.join("profile.csv"), &profile)?;
    record::write_profile_auc_csv(&out_dir.join("profile_auc.csv"), &profile)?;
    let title = format!(
        "performance profiles ({metric}, {} problems)",
        table.problems.len()
    );
    std::fs::write(out_dir.join("profile.svg"), plot::profile_svg(&title, &profile))
        .map_err(|e| Failure::Runtime(e.to_string()))?;

    for curve in &profile.curves {
        println!("{}: auc {:.4}", curve.algorithm, curve.auc);
    }
    println!("profile written to {}", out_dir.display());
    Ok(())
}
