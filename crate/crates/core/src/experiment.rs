//! The paired active-learning experiment loop.
//!
//! Per replicate: shuffle and split the dataset, fit a standardizer on the
//! initial labeled rows, train one base network, and copy its weights to a
//! fresh state for every strategy. Each strategy then iterates
//! rank -> select -> annotate -> retrain until the labeled budget is reached,
//! recording test-set metrics after every iteration. Because all strategies
//! within a replicate share the split, the standardizer, and the base
//! weights, their curves are directly comparable.

use std::sync::Arc;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{
    batch_maxmin_select, greedy_maxmin_select, random_select, StrategyKind,
};
use crate::analysis::{metrics, MetricsRecord};
use crate::data::{fit_standardizer, split, Dataset, SplitSpec, Standardizer};
use crate::error::{Error, Result};
use crate::mcdue::{mcdue_scores, select_top_m, McConfig};
use crate::nn::{train, AdamConfig, Network, NetworkSpec, TrainOptions};
use crate::rng;

// seed-derivation tags
const TAG_SPLIT: u64 = 1;
const TAG_INIT: u64 = 2;
const TAG_BASE_TRAIN: u64 = 3;
const TAG_RETRAIN: u64 = 4;
const TAG_ACQUIRE: u64 = 5;
const TAG_MC: u64 = 6;
const TAG_REINIT: u64 = 7;

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub adam: AdamConfig,
    pub mc: McConfig,
    pub strategies: Vec<StrategyKind>,
    pub replicates: usize,
    /// Points annotated per iteration.
    pub samples_per_step: usize,
    /// Final labeled-set size; the loop stops once reached.
    pub budget: usize,
    /// Split fractions; the seed field is replaced by a per-replicate
    /// derived seed.
    pub split: SplitSpec,
    /// When set, overrides the train fraction: the labeled set starts as the
    /// first `initial_labeled` shuffled non-test rows, the rest is pool.
    pub initial_labeled: Option<usize>,
    pub epochs_base: usize,
    pub epochs_retrain: usize,
    /// Retrain from the current weights instead of a fresh initialization.
    pub warm_start: bool,
    pub batch_size: usize,
    pub standardize_targets: bool,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(network: NetworkSpec) -> Self {
        Self {
            network,
            adam: AdamConfig::default(),
            mc: McConfig::default(),
            strategies: vec![StrategyKind::Mcdue, StrategyKind::Random],
            replicates: 20,
            samples_per_step: 100,
            budget: 0,
            split: SplitSpec::default(),
            initial_labeled: None,
            epochs_base: 10_000,
            epochs_retrain: 2_000,
            warm_start: true,
            batch_size: 64,
            standardize_targets: true,
            master_seed: 0,
        }
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        self.network.validate()?;
        self.adam.validate()?;
        self.mc.validate()?;
        self.split.validate()?;
        if self.network.input_dim != ds.n_features() {
            return Err(Error::Config(format!(
                "network expects {} inputs but the dataset has {} features",
                self.network.input_dim,
                ds.n_features()
            )));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        for s in &self.strategies {
            s.validate()?;
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.samples_per_step == 0 {
            return Err(Error::Config("samples_per_step must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        let n = ds.n_rows();
        let n_test = (self.split.test_fraction * n as f64).round() as usize;
        let non_test = n - n_test;
        let initial = match self.initial_labeled {
            Some(i) => i,
            None => (self.split.train_fraction * n as f64).round() as usize,
        };
        if initial == 0 || initial >= non_test {
            return Err(Error::Config(format!(
                "initial labeled size {initial} leaves no pool (non-test rows: {non_test})"
            )));
        }
        if self.budget < initial || self.budget > non_test {
            return Err(Error::Config(format!(
                "budget {} must lie in [{initial}, {non_test}]",
                self.budget
            )));
        }
        Ok(())
    }
}

/// Evolving index partition plus the current network for one strategy.
#[derive(Debug, Clone)]
pub struct AlState {
    pub labeled: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
    pub network: Network,
    pub iteration: usize,
    pub history: Vec<MetricsRecord>,
}

impl AlState {
    /// Disjointness and conservation over the full index range.
    pub fn check_invariants(&self, n_rows: usize) -> Result<()> {
        let mut all: Vec<usize> = self
            .labeled
            .iter()
            .chain(&self.pool)
            .chain(&self.test)
            .cloned()
            .collect();
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        if all.len() != before {
            return Err(Error::Config("index sets overlap".into()));
        }
        if all.iter().any(|&i| i >= n_rows) {
            return Err(Error::Config("index out of range".into()));
        }
        if self.history.len() != self.iteration + 1 {
            return Err(Error::Config(format!(
                "history has {} records after {} iterations",
                self.history.len(),
                self.iteration
            )));
        }
        Ok(())
    }
}

/// One annotated pool point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub iteration: usize,
    /// Row index in the original dataset.
    pub dataset_index: usize,
    /// Acquisition score at selection time, when the strategy defines one.
    pub score: Option<f64>,
}

/// Full trajectory of one `(strategy, replicate)` pair.
#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub strategy: StrategyKind,
    pub replicate: usize,
    pub history: Vec<MetricsRecord>,
    pub selections: Vec<SelectionRecord>,
    pub network: Network,
    pub standardizer: Standardizer,
    pub test_indices: Vec<usize>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub strategies: Vec<StrategyKind>,
    pub replicates: usize,
    /// Replicate-major: `runs[rep * strategies.len() + strategy]`.
    pub runs: Vec<StrategyRun>,
}

impl ExperimentResult {
    pub fn run(&self, strategy: StrategyKind, replicate: usize) -> Option<&StrategyRun> {
        self.runs
            .iter()
            .find(|r| r.strategy == strategy && r.replicate == replicate)
    }

    /// Per-replicate histories for one strategy, ordered by replicate.
    pub fn histories(&self, strategy: StrategyKind) -> Vec<Vec<MetricsRecord>> {
        (0..self.replicates)
            .filter_map(|rep| self.run(strategy, rep).map(|r| r.history.clone()))
            .collect()
    }
}

/// Shared per-replicate data every strategy sees identically.
struct ReplicateContext<'a> {
    cfg: &'a ExperimentConfig,
    /// Standardized features for the full dataset.
    features: Arc<Array2<f64>>,
    /// Targets in training units (standardized when configured).
    train_targets: Arc<Array1<f64>>,
    /// Raw targets, for metrics in original units.
    raw_targets: &'a Array1<f64>,
    standardizer: Standardizer,
    rep_seed: u64,
    replicate: usize,
}

impl ReplicateContext<'_> {
    fn rows(&self, idx: &[usize]) -> Array2<f64> {
        self.features.select(ndarray::Axis(0), idx)
    }

    fn train_targets_at(&self, idx: &[usize]) -> Array1<f64> {
        idx.iter().map(|&i| self.train_targets[i]).collect()
    }

    /// Test-set metrics in original target units.
    fn evaluate(&self, net: &Network, test: &[usize]) -> Result<MetricsRecord> {
        let preds = net.forward_batch(self.rows(test).view(), None)?;
        let preds = if self.cfg.standardize_targets {
            self.standardizer.inverse_transform_targets(preds.view())
        } else {
            preds
        };
        let truth: Array1<f64> = test.iter().map(|&i| self.raw_targets[i]).collect();
        metrics(preds.view(), truth.view())
    }

    fn train_on(&self, net: &Network, idx: &[usize], epochs: usize, seed: u64) -> Result<Network> {
        let opts = TrainOptions {
            epochs,
            batch_size: self.cfg.batch_size,
            seed,
            adam: self.cfg.adam,
        };
        train(
            net,
            self.rows(idx).view(),
            self.train_targets_at(idx).view(),
            &opts,
        )
    }
}

/// Score the pool, annotate the best `min(m, budget remainder)` points, and
/// retrain. Returns the empty vector (without touching the state) once the
/// budget is met or the pool is empty — the loop-termination signal.
fn al_iteration(
    state: &mut AlState,
    strategy: StrategyKind,
    strategy_index: usize,
    ctx: &ReplicateContext<'_>,
) -> Result<Vec<SelectionRecord>> {
    let cfg = ctx.cfg;
    let remaining = cfg.budget.saturating_sub(state.labeled.len());
    let take = cfg.samples_per_step.min(remaining).min(state.pool.len());
    if take == 0 {
        return Ok(Vec::new());
    }
    let iteration = state.iteration + 1;
    let tags = [strategy_index as u64, iteration as u64];

    // pool positions, not dataset indices
    let picked: Vec<(usize, Option<f64>)> = match strategy {
        StrategyKind::Mcdue => {
            let pool_x = ctx.rows(&state.pool);
            let mc = McConfig {
                base_seed: rng::mix(ctx.rep_seed, &[TAG_MC, tags[0], tags[1]]),
                ..cfg.mc
            };
            let scores = mcdue_scores(&state.network, pool_x.view(), &mc)?;
            select_top_m(&scores, take)?
                .into_iter()
                .map(|p| (p, Some(scores[p].score)))
                .collect()
        }
        StrategyKind::Random => {
            let mut stream = rng::stream(ctx.rep_seed, &[TAG_ACQUIRE, tags[0], tags[1]]);
            random_select(state.pool.len(), take, &mut stream)?
                .into_iter()
                .map(|p| (p, None))
                .collect()
        }
        StrategyKind::GreedyMaxMin => {
            let pool_x = ctx.rows(&state.pool);
            let labeled_x = ctx.rows(&state.labeled);
            greedy_maxmin_select(pool_x.view(), labeled_x.view(), take)?
                .into_iter()
                .map(|p| (p, None))
                .collect()
        }
        StrategyKind::BatchMaxMin { batch } => {
            let pool_x = ctx.rows(&state.pool);
            let labeled_x = ctx.rows(&state.labeled);
            batch_maxmin_select(pool_x.view(), labeled_x.view(), take, batch)?
                .into_iter()
                .map(|p| (p, None))
                .collect()
        }
    };

    // annotate: move the picks (with their labels) from pool to labeled
    let mut selections = Vec::with_capacity(picked.len());
    let mut moved = vec![false; state.pool.len()];
    for (pos, score) in picked {
        let dataset_index = state.pool[pos];
        moved[pos] = true;
        state.labeled.push(dataset_index);
        selections.push(SelectionRecord {
            iteration,
            dataset_index,
            score,
        });
    }
    let mut keep_iter = moved.iter();
    state.pool.retain(|_| !keep_iter.next().unwrap());

    // retrain on the grown labeled set
    let retrain_seed = rng::mix(ctx.rep_seed, &[TAG_RETRAIN, tags[0], tags[1]]);
    state.network = if cfg.warm_start {
        ctx.train_on(&state.network, &state.labeled, cfg.epochs_retrain, retrain_seed)?
    } else {
        let fresh = Network::init(
            cfg.network.clone(),
            rng::mix(ctx.rep_seed, &[TAG_REINIT, tags[0], tags[1]]),
        )?;
        ctx.train_on(&fresh, &state.labeled, cfg.epochs_retrain, retrain_seed)?
    };

    state.iteration = iteration;
    let record = ctx
        .evaluate(&state.network, &state.test)?
        .with_context(iteration, state.labeled.len());
    state.history.push(record);
    Ok(selections)
}

fn initial_partition(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let spec = SplitSpec {
        seed,
        ..cfg.split
    };
    let parts = split(n, &spec)?;
    match cfg.initial_labeled {
        None => Ok((parts.train, parts.pool, parts.test)),
        Some(initial) => {
            // carve the labeled set off the front of the shuffled non-test rows
            let mut non_test = parts.train;
            non_test.extend(parts.pool);
            if initial >= non_test.len() {
                return Err(Error::Config(format!(
                    "initial labeled size {initial} leaves no pool"
                )));
            }
            let pool = non_test.split_off(initial);
            Ok((non_test, pool, parts.test))
        }
    }
}

fn run_replicate(cfg: &ExperimentConfig, ds: &Dataset, replicate: usize) -> Result<Vec<StrategyRun>> {
    let rep_seed = rng::mix(cfg.master_seed, &[replicate as u64]);
    let (labeled, pool, test) =
        initial_partition(cfg, ds.n_rows(), rng::mix(rep_seed, &[TAG_SPLIT]))?;

    let standardizer = fit_standardizer(ds, &labeled)?;
    let features = Arc::new(standardizer.transform_features(ds.features.view()));
    let train_targets = Arc::new(if cfg.standardize_targets {
        standardizer.transform_targets(ds.targets.view())
    } else {
        ds.targets.clone()
    });

    let ctx = ReplicateContext {
        cfg,
        features,
        train_targets,
        raw_targets: &ds.targets,
        standardizer,
        rep_seed,
        replicate,
    };

    // one base network, trained once, copied to every strategy
    let base = Network::init(cfg.network.clone(), rng::mix(rep_seed, &[TAG_INIT]))?;
    let base = ctx.train_on(&base, &labeled, cfg.epochs_base, rng::mix(rep_seed, &[TAG_BASE_TRAIN]))?;
    let base_record = ctx
        .evaluate(&base, &test)?
        .with_context(0, labeled.len());

    let mut runs = Vec::with_capacity(cfg.strategies.len());
    for (strategy_index, &strategy) in cfg.strategies.iter().enumerate() {
        let started = Instant::now();
        let mut state = AlState {
            labeled: labeled.clone(),
            pool: pool.clone(),
            test: test.clone(),
            network: base.clone(),
            iteration: 0,
            history: vec![base_record],
        };
        let mut selections = Vec::new();
        while state.labeled.len() < cfg.budget && !state.pool.is_empty() {
            let step = al_iteration(&mut state, strategy, strategy_index, &ctx)?;
            if step.is_empty() {
                break;
            }
            selections.extend(step);
        }
        debug_assert!(state.check_invariants(ds.n_rows()).is_ok());
        runs.push(StrategyRun {
            strategy,
            replicate: ctx.replicate,
            history: state.history,
            selections,
            network: state.network,
            standardizer: ctx.standardizer.clone(),
            test_indices: state.test,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(runs)
}

/// Run every `(replicate, strategy)` pair. Replicates execute in parallel;
/// the result order is deterministic (replicate-major, strategies in config
/// order) and the contents are reproducible bit-for-bit for a fixed config.
pub fn run_experiment(cfg: &ExperimentConfig, ds: &Dataset) -> Result<ExperimentResult> {
    cfg.validate(ds)?;
    let per_replicate: Vec<Vec<StrategyRun>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| run_replicate(cfg, ds, rep))
        .collect::<Result<_>>()?;
    Ok(ExperimentResult {
        strategies: cfg.strategies.clone(),
        replicates: cfg.replicates,
        runs: per_replicate.into_iter().flatten().collect(),
    })
}
