//! `dal run`: execute an experiment and persist the full record.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dal_core::analysis::{ratio_curve_replicates, MetricKind};
use dal_core::experiment::run_experiment;
use dal_core::{plot, record, StrategyKind};

use crate::config::load_config;
use crate::manifest::{DatasetInfo, RunManifest};
use crate::Failure;

fn default_out_dir(config_path: &Path) -> PathBuf {
    let root = std::env::var_os("DAL_OUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("dal-runs"));
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    root.join(format!("{stem}-{}", chrono::Utc::now().format("%Y%m%dT%H%M%SZ")))
}

pub fn execute(
    config_path: &Path,
    out: Option<PathBuf>,
    replicates: Option<usize>,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let file = load_config(config_path)?;
    let ds = file.load_dataset()?;
    let mut cfg = file.experiment_config(&ds)?;
    if let Some(r) = replicates {
        cfg.replicates = r;
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg.validate(&ds).map_err(|e| Failure::Usage(e.to_string()))?;

    let out_dir = out.unwrap_or_else(|| default_out_dir(config_path));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;

    eprintln!(
        "running {} strategies x {} replicates on {} ({} rows, {} features)",
        cfg.strategies.len(),
        cfg.replicates,
        ds.provenance,
        ds.n_rows(),
        ds.n_features()
    );
    let result = run_experiment(&cfg, &ds)?;

    let mut outputs = BTreeMap::new();
    let metrics_path = out_dir.join("metrics.csv");
    record::write_metrics_csv(&metrics_path, &result)?;
    outputs.insert("metrics".to_string(), "metrics.csv".to_string());
    record::write_selections_csv(&out_dir.join("selections.csv"), &result)?;
    outputs.insert("selections".to_string(), "selections.csv".to_string());
    record::write_timings_csv(&out_dir.join("timings.csv"), &result)?;
    outputs.insert("timings".to_string(), "timings.csv".to_string());
    record::write_checkpoints(&out_dir.join("checkpoints"), &result, cfg.standardize_targets)?;
    outputs.insert("checkpoints".to_string(), "checkpoints/".to_string());

    std::fs::write(
        out_dir.join("config.json"),
        serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?,
    )
    .map_err(|e| Failure::Runtime(e.to_string()))?;
    outputs.insert("config".to_string(), "config.json".to_string());

    // ratio curves of every baseline against the candidate strategy
    let candidate = if cfg.strategies.contains(&StrategyKind::Mcdue) {
        StrategyKind::Mcdue
    } else {
        cfg.strategies[0]
    };
    let cand_histories = result.histories(candidate);
    for &baseline in cfg.strategies.iter().filter(|&&s| s != candidate) {
        let base_histories = result.histories(baseline);
        for metric in MetricKind::ALL {
            let curve = ratio_curve_replicates(&cand_histories, &base_histories, metric)?;
            if !curve.excluded.is_empty() {
                eprintln!(
                    "warning: ratio {baseline} vs {candidate} ({metric}) skipped labeled sizes {:?} (zero candidate error)",
                    curve.excluded
                );
            }
            let stem = format!("ratio_{baseline}_vs_{candidate}_{metric}");
            record::write_ratio_csv(&out_dir.join(format!("{stem}.csv")), &curve)?;
            let title = format!("{baseline} / {candidate} error ratio ({metric})");
            std::fs::write(
                out_dir.join(format!("{stem}.svg")),
                plot::ratio_svg(&title, &curve),
            )
            .map_err(|e| Failure::Runtime(e.to_string()))?;
            outputs.insert(stem.clone(), format!("{stem}.csv"));
        }
    }

    let manifest = RunManifest::new(
        config_path,
        cfg.clone(),
        DatasetInfo {
            provenance: ds.provenance.clone(),
            rows: ds.n_rows(),
            features: ds.n_features(),
        },
        outputs,
    );
    manifest.write(&out_dir.join("manifest.json"))?;

    // final-iteration summary per strategy
    for &strategy in &cfg.strategies {
        let finals: Vec<f64> = result
            .histories(strategy)
            .iter()
            .map(|h| h.last().map(|r| r.rmse).unwrap_or(f64::NAN))
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        println!("{strategy}: final rmse mean {mean:.6} over {} replicates", finals.len());
    }
    println!("run record written to {}", out_dir.display());
    Ok(())
}
