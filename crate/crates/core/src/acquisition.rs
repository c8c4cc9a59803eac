//! Baseline sampling strategies: random, greedy max-min, and batch max-min
//! farthest-point selection.
//!
//! Max-min distances are plain squared Euclidean distances; callers are
//! expected to pass features in the same standardized scale the model sees,
//! otherwise one wide feature dominates the geometry.

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which acquisition rule drives an active-learning run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyKind {
    Mcdue,
    Random,
    GreedyMaxMin,
    BatchMaxMin { batch: usize },
}

impl StrategyKind {
    pub fn validate(&self) -> Result<()> {
        if let StrategyKind::BatchMaxMin { batch } = self {
            if *batch == 0 {
                return Err(Error::Config("batch max-min needs batch >= 1".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Mcdue => write!(f, "mcdue"),
            StrategyKind::Random => write!(f, "random"),
            StrategyKind::GreedyMaxMin => write!(f, "greedy-maxmin"),
            StrategyKind::BatchMaxMin { batch } => write!(f, "batch-maxmin:{batch}"),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcdue" => Ok(StrategyKind::Mcdue),
            "random" => Ok(StrategyKind::Random),
            "greedy-maxmin" => Ok(StrategyKind::GreedyMaxMin),
            "batch-maxmin" => Ok(StrategyKind::BatchMaxMin { batch: 4 }),
            other => {
                if let Some(k) = other.strip_prefix("batch-maxmin:") {
                    let batch: usize = k
                        .parse()
                        .map_err(|_| Error::Config(format!("bad batch size in '{other}'")))?;
                    let kind = StrategyKind::BatchMaxMin { batch };
                    kind.validate()?;
                    Ok(kind)
                } else {
                    Err(Error::Config(format!("unknown strategy '{other}'")))
                }
            }
        }
    }
}

/// `m` distinct uniform indices from `0..pool_size`.
pub fn random_select(pool_size: usize, m: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    if m == 0 || m > pool_size {
        return Err(Error::Config(format!(
            "cannot draw {m} of {pool_size} pool points"
        )));
    }
    Ok(rand::seq::index::sample(rng, pool_size, m).into_vec())
}

fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Minimum squared Euclidean distance from `x` to any row of `train`.
pub fn maxmin_score(x: ArrayView1<'_, f64>, train: ArrayView2<'_, f64>) -> Result<f64> {
    if train.nrows() == 0 {
        return Err(Error::Empty("reference set is empty".into()));
    }
    if x.len() != train.ncols() {
        return Err(Error::Shape(format!(
            "point has {} dims, reference has {}",
            x.len(),
            train.ncols()
        )));
    }
    Ok(train
        .rows()
        .into_iter()
        .map(|row| squared_distance(x, row))
        .fold(f64::INFINITY, f64::min))
}

fn check_selection_args(pool: ArrayView2<'_, f64>, train: ArrayView2<'_, f64>, m: usize) -> Result<()> {
    if train.nrows() == 0 {
        return Err(Error::Empty("reference set is empty".into()));
    }
    if pool.ncols() != train.ncols() {
        return Err(Error::Shape(format!(
            "pool has {} dims, reference has {}",
            pool.ncols(),
            train.ncols()
        )));
    }
    if m == 0 || m > pool.nrows() {
        return Err(Error::Config(format!(
            "cannot select {m} of {} pool points",
            pool.nrows()
        )));
    }
    Ok(())
}

// argmax over still-available pool points; ties go to the lower index
fn argmax_available(min_dist: &[f64], taken: &[bool]) -> usize {
    let mut best = usize::MAX;
    let mut best_val = f64::NEG_INFINITY;
    for (j, (&d, &t)) in min_dist.iter().zip(taken.iter()).enumerate() {
        if !t && d > best_val {
            best_val = d;
            best = j;
        }
    }
    best
}

/// Farthest-point sampling: repeatedly pick the pool point with the largest
/// min-distance to the reference set, then grow the reference set with the
/// pick. Min-distances are updated incrementally, so the total cost is
/// `O((n_train + m) * n_pool)` distance evaluations.
pub fn greedy_maxmin_select(
    pool: ArrayView2<'_, f64>,
    train: ArrayView2<'_, f64>,
    m: usize,
) -> Result<Vec<usize>> {
    check_selection_args(pool, train, m)?;
    let n = pool.nrows();
    let mut min_dist: Vec<f64> = (0..n)
        .map(|j| maxmin_score(pool.row(j), train).expect("shapes checked"))
        .collect();
    let mut taken = vec![false; n];
    let mut picks = Vec::with_capacity(m);
    for _ in 0..m {
        let pick = argmax_available(&min_dist, &taken);
        taken[pick] = true;
        picks.push(pick);
        for j in 0..n {
            if !taken[j] {
                let d = squared_distance(pool.row(j), pool.row(pick));
                if d < min_dist[j] {
                    min_dist[j] = d;
                }
            }
        }
    }
    Ok(picks)
}

/// Batched farthest-point sampling: each round commits the top `batch`
/// scores against the current reference set without intra-batch updates,
/// then folds the committed picks into the reference set. The final round is
/// truncated so exactly `m` indices return. `batch = 1` reproduces
/// [`greedy_maxmin_select`] exactly.
pub fn batch_maxmin_select(
    pool: ArrayView2<'_, f64>,
    train: ArrayView2<'_, f64>,
    m: usize,
    batch: usize,
) -> Result<Vec<usize>> {
    check_selection_args(pool, train, m)?;
    if batch == 0 {
        return Err(Error::Config("batch max-min needs batch >= 1".into()));
    }
    let n = pool.nrows();
    let mut min_dist: Vec<f64> = (0..n)
        .map(|j| maxmin_score(pool.row(j), train).expect("shapes checked"))
        .collect();
    let mut taken = vec![false; n];
    let mut picks: Vec<usize> = Vec::with_capacity(m);
    while picks.len() < m {
        let round = batch.min(m - picks.len());
        let mut candidates: Vec<usize> = (0..n).filter(|&j| !taken[j]).collect();
        candidates.sort_by(|&a, &b| min_dist[b].total_cmp(&min_dist[a]).then(a.cmp(&b)));
        let committed: Vec<usize> = candidates[..round].to_vec();
        for &pick in &committed {
            taken[pick] = true;
            picks.push(pick);
        }
        for &pick in &committed {
            for j in 0..n {
                if !taken[j] {
                    let d = squared_distance(pool.row(j), pool.row(pick));
                    if d < min_dist[j] {
                        min_dist[j] = d;
                    }
                }
            }
        }
    }
    Ok(picks)
}
