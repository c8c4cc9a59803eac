//! `dal gen-rosenbrock`: synthetic dataset generation.

use std::path::Path;

use dal_core::data::generate_rosenbrock;

use crate::Failure;

pub fn execute(
    samples: usize,
    dim: usize,
    lo: f64,
    hi: f64,
    seed: u64,
    out: &Path,
) -> Result<(), Failure> {
    let ds = generate_rosenbrock(samples, dim, lo, hi, seed)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Failure::Runtime(format!("creating {}: {e}", parent.display())))?;
        }
    }
    ds.write_csv(out)?;
    println!(
        "wrote {} rows x {} features (box [{lo}, {hi}], seed {seed}) to {}",
        samples,
        dim,
        out.display()
    );
    Ok(())
}
