//! Dataset ingestion, standardization, seeded shuffling/splitting, and the
//! synthetic Rosenbrock generator.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A fully materialized regression dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
    pub feature_names: Vec<String>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        targets: Array1<f64>,
        feature_names: Vec<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if features.nrows() != targets.len() {
            return Err(Error::Shape(format!(
                "{} feature rows vs {} targets",
                features.nrows(),
                targets.len()
            )));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::Shape(format!(
                "{} feature names vs {} columns",
                feature_names.len(),
                features.ncols()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) || targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("dataset contains non-finite values".into()));
        }
        Ok(Self {
            features,
            targets,
            feature_names,
            provenance: provenance.into(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Feature rows selected by dataset index.
    pub fn rows(&self, idx: &[usize]) -> Array2<f64> {
        self.features.select(Axis(0), idx)
    }

    /// Target values selected by dataset index.
    pub fn targets_at(&self, idx: &[usize]) -> Array1<f64> {
        idx.iter().map(|&i| self.targets[i]).collect()
    }

    /// Write the dataset as a headered CSV (features then a `target` column).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{},target", self.feature_names.join(","))?;
        for i in 0..self.n_rows() {
            let row: Vec<String> = self.features.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{}", row.join(","), self.targets[i])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Row counts from a CSV ingestion pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_kept: usize,
    pub rows_rejected: usize,
}

/// Load a numeric CSV with a header row. Rows with missing or non-numeric
/// entries are rejected and counted, not fatal.
pub fn load_csv(path: &Path, target_column: &str, delimiter: u8) -> Result<(Dataset, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path)?;

    let headers = reader.headers()?.clone();
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingColumn(target_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let n_cols = headers.len();

    let mut rows: Vec<f64> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    let mut rejected = 0usize;
    for record in reader.records() {
        let record = record?;
        if record.len() != n_cols {
            rejected += 1;
            continue;
        }
        let parsed: Option<Vec<f64>> = record
            .iter()
            .map(|f| f.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match parsed {
            Some(values) => {
                targets.push(values[target_idx]);
                for (i, v) in values.into_iter().enumerate() {
                    if i != target_idx {
                        rows.push(v);
                    }
                }
            }
            None => rejected += 1,
        }
    }

    let kept = targets.len();
    if kept == 0 {
        return Err(Error::Empty(format!(
            "no usable rows in {}",
            path.display()
        )));
    }
    let features = Array2::from_shape_vec((kept, n_cols - 1), rows)
        .map_err(|e| Error::Shape(e.to_string()))?;
    let provenance = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let ds = Dataset::new(features, Array1::from_vec(targets), feature_names, provenance)?;
    Ok((
        ds,
        IngestReport {
            rows_kept: kept,
            rows_rejected: rejected,
        },
    ))
}

/// Shuffle-and-split fractions, applied to row indices.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub pool_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.2,
            pool_fraction: 0.6,
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let fs = [self.train_fraction, self.pool_fraction, self.test_fraction];
        if fs.iter().any(|f| !f.is_finite() || *f <= 0.0) {
            return Err(Error::Config("split fractions must be positive".into()));
        }
        let sum: f64 = fs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split fractions sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Disjoint index partition of `0..n`.
#[derive(Debug, Clone)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
}

/// A seeded permutation of `0..n`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, &[]));
    idx
}

/// Shuffle `0..n` and split by the spec's fractions. Train and test sizes are
/// `round(fraction * n)`; the remainder goes to the pool.
pub fn split(n: usize, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    if n < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    let n_test = (spec.test_fraction * n as f64).round() as usize;
    let n_pool = n
        .checked_sub(n_train + n_test)
        .ok_or_else(|| Error::Config("split fractions leave no room for a pool".into()))?;

    let idx = shuffled_indices(n, spec.seed);
    Ok(SplitIndices {
        train: idx[..n_train].to_vec(),
        pool: idx[n_train..n_train + n_pool].to_vec(),
        test: idx[n_train + n_pool..].to_vec(),
    })
}

/// Per-column location/scale statistics fitted on training rows only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    pub feature_mean: Array1<f64>,
    pub feature_std: Array1<f64>,
    pub target_mean: f64,
    pub target_std: f64,
}

// Constant columns get std 1 so they map to exactly zero instead of NaN.
fn column_stats(values: ArrayView1<'_, f64>) -> (f64, f64) {
    let n = values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return (min, 1.0);
    }
    let mean = values.sum() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std <= 1e-12 * mean.abs().max(1.0) {
        (mean, 1.0)
    } else {
        (mean, std)
    }
}

/// Fit a standardizer from the training rows of `ds`. Pool and test rows are
/// never touched.
pub fn fit_standardizer(ds: &Dataset, train_idx: &[usize]) -> Result<Standardizer> {
    if train_idx.is_empty() {
        return Err(Error::Empty("standardizer needs at least one training row".into()));
    }
    let train_x = ds.rows(train_idx);
    let train_y = ds.targets_at(train_idx);
    let mut feature_mean = Array1::zeros(ds.n_features());
    let mut feature_std = Array1::zeros(ds.n_features());
    for j in 0..ds.n_features() {
        let (m, s) = column_stats(train_x.column(j));
        feature_mean[j] = m;
        feature_std[j] = s;
    }
    let (target_mean, target_std) = column_stats(train_y.view());
    Ok(Standardizer {
        feature_mean,
        feature_std,
        target_mean,
        target_std,
    })
}

impl Standardizer {
    pub fn transform_features(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            row -= &self.feature_mean;
            row /= &self.feature_std;
        }
        out
    }

    pub fn transform_targets(&self, y: ArrayView1<'_, f64>) -> Array1<f64> {
        y.mapv(|v| (v - self.target_mean) / self.target_std)
    }

    pub fn inverse_transform_targets(&self, y: ArrayView1<'_, f64>) -> Array1<f64> {
        y.mapv(|v| v * self.target_std + self.target_mean)
    }
}

/// The classic banana-valley benchmark function, summed over adjacent
/// coordinate pairs. Global minimum 0 at (1, ..., 1).
pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Config(format!(
            "rosenbrock needs dimension >= 2, got {}",
            x.len()
        )));
    }
    Ok(x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum())
}

/// Sample `n_samples` points uniformly from `[lo, hi]^dim` and label them
/// with [`rosenbrock`].
pub fn generate_rosenbrock(
    n_samples: usize,
    dim: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    if dim < 2 {
        return Err(Error::Config(format!(
            "rosenbrock needs dimension >= 2, got {dim}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("invalid sampling box [{lo}, {hi}]")));
    }
    let mut rng = rng::stream(seed, &[]);
    let features = Array2::from_shape_fn((n_samples, dim), |_| rng.random_range(lo..hi));
    let targets: Array1<f64> = features
        .rows()
        .into_iter()
        .map(|row| rosenbrock(row.as_slice().expect("contiguous row")).expect("dim checked"))
        .collect();
    let names = (1..=dim).map(|i| format!("x{i}")).collect();
    Dataset::new(features, targets, names, format!("rosenbrock-{dim}d"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use std::io::Write as _;

    fn toy_dataset() -> Dataset {
        let x = array![[1.0, 10.0], [2.0, 10.0], [3.0, 10.0], [4.0, 10.0]];
        let y = array![1.0, 2.0, 3.0, 4.0];
        Dataset::new(x, y, vec!["a".into(), "b".into()], "toy").unwrap()
    }

    #[test]
    fn split_sizes_follow_fractions() {
        let s = split(10, &SplitSpec::default()).unwrap();
        assert_eq!(s.train.len(), 2);
        assert_eq!(s.pool.len(), 6);
        assert_eq!(s.test.len(), 2);
    }

    #[test]
    fn split_rejects_tiny_and_bad_fractions() {
        assert!(matches!(
            split(4, &SplitSpec::default()),
            Err(Error::InsufficientSamples { needed: 5, got: 4 })
        ));
        let bad = SplitSpec {
            train_fraction: 0.5,
            pool_fraction: 0.5,
            test_fraction: 0.5,
            seed: 0,
        };
        assert!(split(10, &bad).is_err());
    }

    #[test]
    fn split_seeds_differ_sizes_agree() {
        let a = split(50, &SplitSpec::default()).unwrap();
        let b = split(
            50,
            &SplitSpec {
                seed: 1,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        assert_eq!(a.train.len(), b.train.len());
        assert_ne!(a.train, b.train);
        // determinism
        let c = split(50, &SplitSpec::default()).unwrap();
        assert_eq!(a.train, c.train);
        assert_eq!(a.pool, c.pool);
        assert_eq!(a.test, c.test);
    }

    proptest! {
        #[test]
        fn split_is_a_partition(n in 5usize..400, seed in 0u64..1000) {
            let s = split(n, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(&s.pool).chain(&s.test).cloned().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn standardizer_train_columns_are_centered() {
        let x = Array2::from_shape_fn((40, 3), |(i, j)| (i * 3 + j) as f64 * 0.37 - 2.0);
        let y: Array1<f64> = (0..40).map(|i| i as f64).collect();
        let names = vec!["a".into(), "b".into(), "c".into()];
        let ds = Dataset::new(x, y, names, "t").unwrap();
        let train: Vec<usize> = (0..20).collect();
        let st = fit_standardizer(&ds, &train).unwrap();
        let tx = st.transform_features(ds.rows(&train).view());
        for j in 0..3 {
            let col = tx.column(j);
            let mean = col.sum() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-10, "column {j} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-10, "column {j} std {}", var.sqrt());
        }
    }

    #[test]
    fn standardizer_constant_column_maps_to_zero() {
        let ds = toy_dataset();
        let st = fit_standardizer(&ds, &[0, 1, 2, 3]).unwrap();
        assert_eq!(st.feature_std[1], 1.0);
        let tx = st.transform_features(ds.features.view());
        for v in tx.column(1) {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn standardizer_target_round_trip() {
        let ds = toy_dataset();
        let st = fit_standardizer(&ds, &[0, 1, 2, 3]).unwrap();
        let t = st.transform_targets(ds.targets.view());
        let back = st.inverse_transform_targets(t.view());
        for (a, b) in back.iter().zip(ds.targets.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rosenbrock_known_values() {
        assert_eq!(rosenbrock(&[1.0; 7]).unwrap(), 0.0);
        assert_eq!(rosenbrock(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(rosenbrock(&[1.0, 2.0]).unwrap(), 100.0);
        assert!(rosenbrock(&[1.0]).is_err());
    }

    #[test]
    fn rosenbrock_gradient_vanishes_at_minimum() {
        // central finite differences around (1, ..., 1)
        let d = 6;
        let h = 1e-6;
        for i in 0..d {
            let mut hi = vec![1.0; d];
            let mut lo = vec![1.0; d];
            hi[i] += h;
            lo[i] -= h;
            let g = (rosenbrock(&hi).unwrap() - rosenbrock(&lo).unwrap()) / (2.0 * h);
            assert!(g.abs() < 1e-6, "partial {i} = {g}");
        }
    }

    #[test]
    fn generate_rosenbrock_is_seeded_and_nonnegative() {
        let a = generate_rosenbrock(50, 4, -2.0, 2.0, 9).unwrap();
        let b = generate_rosenbrock(50, 4, -2.0, 2.0, 9).unwrap();
        assert_eq!(a.features, b.features);
        assert!(a.targets.iter().all(|v| *v >= 0.0));
        assert!(a.features.iter().all(|v| (-2.0..2.0).contains(v)));
        assert!(generate_rosenbrock(10, 2, 2.0, -2.0, 0).is_err());
    }

    #[test]
    fn load_csv_happy_path_and_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "a,b,y").unwrap();
        writeln!(f, "1.0,2.0,3.0").unwrap();
        writeln!(f, "4.0,oops,6.0").unwrap();
        writeln!(f, "7.0,8.0,9.0").unwrap();
        writeln!(f, "1.0,2.0").unwrap();
        drop(f);

        let (ds, report) = load_csv(&path, "y", b',').unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        assert_eq!(ds.targets, array![3.0, 9.0]);
        assert_eq!(report.rows_kept, 2);
        assert_eq!(report.rows_rejected, 2);

        match load_csv(&path, "missing", b',') {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "missing"),
            other => panic!("expected missing column, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let ds = generate_rosenbrock(20, 3, -2.0, 2.0, 4).unwrap();
        ds.write_csv(&path).unwrap();
        let (back, report) = load_csv(&path, "target", b',').unwrap();
        assert_eq!(report.rows_rejected, 0);
        assert_eq!(back.features, ds.features);
        assert_eq!(back.targets, ds.targets);
    }
}
