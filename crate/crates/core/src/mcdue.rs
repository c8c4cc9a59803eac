//! Monte-Carlo dropout uncertainty scoring.
//!
//! Each pool point is pushed through the network `num_runs` times, each run
//! under an independently sampled dropout mask. The Bessel-corrected sample
//! standard deviation of those outputs is the point's acquisition score; the
//! `m` highest-scoring points are selected for annotation.
//!
//! Scoring is embarrassingly parallel: every pool point owns an RNG stream
//! derived from `(base_seed, pool_index)`, so scores do not depend on
//! iteration order or worker count.

use ndarray::{ArrayView1, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{DropoutMask, Network};
use crate::rng;

/// Monte-Carlo scoring parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of stochastic runs per point.
    pub num_runs: usize,
    /// Dropout probability used at prediction time. Zero is the degenerate
    /// no-noise case: every score is exactly zero.
    pub dropout_prob: f64,
    pub base_seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            num_runs: 25,
            dropout_prob: 0.5,
            base_seed: 0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_runs < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: self.num_runs,
            });
        }
        if !self.dropout_prob.is_finite() || !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(Error::Config(format!(
                "mc dropout_prob must be in [0, 1), got {}",
                self.dropout_prob
            )));
        }
        Ok(())
    }
}

/// A pool point's uncertainty score, keyed by its row in the pool matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionScore {
    pub pool_index: usize,
    pub score: f64,
}

/// `num_runs` stochastic outputs for one point, one fresh full-network mask
/// per run, drawn from the caller's stream.
pub fn mc_predict(
    net: &Network,
    x: ArrayView1<'_, f64>,
    cfg: &McConfig,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let hidden = &net.spec().hidden_sizes;
    (0..cfg.num_runs)
        .map(|_| {
            let mask = DropoutMask::sample(hidden, cfg.dropout_prob, rng)?;
            net.forward(x, Some(&mask))
        })
        .collect()
}

/// Bessel-corrected sample standard deviation.
///
/// Computed with Welford's update, which returns exactly zero for constant
/// input; the two-pass textbook formula agrees to machine precision.
pub fn mc_std(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    Ok((m2 / (samples.len() - 1) as f64).sqrt())
}

/// Score every pool row. Cost is `num_runs` forward passes per point;
/// points are scored in parallel and returned in pool order.
pub fn mcdue_scores(
    net: &Network,
    pool: ArrayView2<'_, f64>,
    cfg: &McConfig,
) -> Result<Vec<AcquisitionScore>> {
    cfg.validate()?;
    if pool.nrows() == 0 {
        return Err(Error::Empty("pool is empty".into()));
    }
    if pool.ncols() != net.spec().input_dim {
        return Err(Error::Shape(format!(
            "pool has {} columns, expected {}",
            pool.ncols(),
            net.spec().input_dim
        )));
    }
    (0..pool.nrows())
        .into_par_iter()
        .map(|j| {
            let mut stream = rng::stream(cfg.base_seed, &[j as u64]);
            let samples = mc_predict(net, pool.row(j), cfg, &mut stream)?;
            Ok(AcquisitionScore {
                pool_index: j,
                score: mc_std(&samples)?,
            })
        })
        .collect()
}

/// Indices of the `m` largest scores, in descending score order; ties break
/// toward the lower pool index.
pub fn select_top_m(scores: &[AcquisitionScore], m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > scores.len() {
        return Err(Error::Config(format!(
            "cannot select {m} of {} scores",
            scores.len()
        )));
    }
    let mut ranked: Vec<&AcquisitionScore> = scores.iter().collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.pool_index.cmp(&b.pool_index))
    });
    Ok(ranked[..m].iter().map(|s| s.pool_index).collect())
}
