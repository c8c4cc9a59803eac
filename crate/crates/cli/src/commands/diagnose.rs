//! `dal diagnose`: uncertainty-versus-error scatter for a trained network.

use std::path::{Path, PathBuf};

use dal_core::analysis::std_error_diagnostic;
use dal_core::data::load_csv;
use dal_core::nn::load_checkpoint;
use dal_core::{plot, record, McConfig};

use crate::config::parse_delimiter;
use crate::Failure;

#[allow(clippy::too_many_arguments)]
pub fn execute(
    checkpoint: &Path,
    data: &Path,
    target: &str,
    delimiter: Option<&str>,
    runs: usize,
    dropout: Option<f64>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if runs < 2 {
        return Err(Failure::Usage(format!(
            "at least 2 stochastic runs are required, got {runs}"
        )));
    }
    let ck = load_checkpoint(checkpoint)
        .map_err(|e| Failure::Usage(format!("loading {}: {e}", checkpoint.display())))?;
    let delimiter = parse_delimiter(delimiter)?;
    if !data.exists() {
        return Err(Failure::Usage(format!(
            "dataset file {} does not exist",
            data.display()
        )));
    }
    let (ds, report) = load_csv(data, target, delimiter)
        .map_err(|e| Failure::Usage(format!("loading {}: {e}", data.display())))?;
    if report.rows_rejected > 0 {
        eprintln!("note: rejected {} malformed rows", report.rows_rejected);
    }

    // evaluate in the units the network was trained in
    let (features, targets) = match &ck.standardizer {
        Some(st) => {
            let x = st.transform_features(ds.features.view());
            let y = if ck.standardized_targets {
                st.transform_targets(ds.targets.view())
            } else {
                ds.targets.clone()
            };
            (x, y)
        }
        None => (ds.features.clone(), ds.targets.clone()),
    };

    let cfg = McConfig {
        num_runs: runs,
        dropout_prob: dropout.unwrap_or(ck.network.spec().dropout_prob),
        base_seed: seed,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let diag = std_error_diagnostic(&ck.network, features.view(), targets.view(), &cfg)?;

    let out_dir = out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;
    record::write_diagnostic_csv(&out_dir.join("diagnostic.csv"), &diag)?;
    let title = format!("MC std vs absolute error ({} points)", diag.points.len());
    std::fs::write(out_dir.join("diagnostic.svg"), plot::diagnostic_svg(&title, &diag))
        .map_err(|e| Failure::Runtime(e.to_string()))?;

    match diag.pearson_r {
        Some(r) => println!("pearson_r = {r:.3}"),
        None => println!("correlation undefined (constant MC std or error)"),
    }
    println!("median_mc_std = {}", diag.median_std);
    println!("median_abs_error = {}", diag.median_abs_error);
    match diag.high_std_error_percentile {
        Some(p) => println!("high_uncertainty_error_percentile = {p:.3}"),
        None => println!("high_uncertainty_error_percentile = n/a"),
    }
    println!("diagnostic written to {}", out_dir.display());
    Ok(())
}
