//! Declarative run configuration (TOML).
//!
//! A config file fully describes an experiment: the dataset source, the
//! network and training hyperparameters, the MC scoring parameters, and the
//! active-learning protocol. Command-line flags override individual keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dal_core::data::{load_csv, Dataset, SplitSpec};
use dal_core::nn::{AdamConfig, NetworkSpec};
use dal_core::{ExperimentConfig, McConfig, StrategyKind};

use crate::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub data: DataSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub mc: McSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// "csv" or "rosenbrock".
    pub source: String,
    pub path: Option<PathBuf>,
    pub target: Option<String>,
    pub delimiter: Option<String>,
    pub samples: Option<usize>,
    pub dim: Option<usize>,
    /// Sampling box for the synthetic generator.
    pub bounds: Option<[f64; 2]>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub hidden: Vec<usize>,
    pub leakiness: f64,
    pub dropout: f64,
    pub l2: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            hidden: vec![256, 128, 64],
            leakiness: 0.01,
            dropout: 0.5,
            l2: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub epochs_base: usize,
    pub epochs_retrain: usize,
    pub batch_size: usize,
    pub warm_start: bool,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub standardize_targets: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            epochs_base: 10_000,
            epochs_retrain: 2_000,
            batch_size: 64,
            warm_start: true,
            learning_rate: adam.learning_rate,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            standardize_targets: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub runs: usize,
    pub dropout: f64,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            runs: 25,
            dropout: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub strategies: Vec<String>,
    pub samples_per_step: usize,
    pub budget: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub initial_labeled: Option<usize>,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_pool_fraction")]
    pub pool_fraction: f64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_replicates() -> usize {
    20
}
fn default_train_fraction() -> f64 {
    0.2
}
fn default_pool_fraction() -> f64 {
    0.6
}
fn default_test_fraction() -> f64 {
    0.2
}

pub fn load_config(path: &Path) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

impl ConfigFile {
    /// Materialize the dataset this config points at.
    pub fn load_dataset(&self) -> Result<Dataset, Failure> {
        match self.data.source.as_str() {
            "csv" => {
                let path = self
                    .data
                    .path
                    .as_ref()
                    .ok_or_else(|| Failure::Usage("data.path is required for source = \"csv\"".into()))?;
                let target = self
                    .data
                    .target
                    .as_ref()
                    .ok_or_else(|| Failure::Usage("data.target is required for source = \"csv\"".into()))?;
                let delimiter = parse_delimiter(self.data.delimiter.as_deref())?;
                if !path.exists() {
                    return Err(Failure::Usage(format!(
                        "dataset file {} does not exist",
                        path.display()
                    )));
                }
                let (ds, report) = load_csv(path, target, delimiter)
                    .map_err(|e| Failure::Usage(format!("loading {}: {e}", path.display())))?;
                if report.rows_rejected > 0 {
                    eprintln!(
                        "note: rejected {} malformed rows from {} ({} kept)",
                        report.rows_rejected,
                        path.display(),
                        report.rows_kept
                    );
                }
                Ok(ds)
            }
            "rosenbrock" => {
                let samples = self
                    .data
                    .samples
                    .ok_or_else(|| Failure::Usage("data.samples is required for rosenbrock".into()))?;
                let dim = self
                    .data
                    .dim
                    .ok_or_else(|| Failure::Usage("data.dim is required for rosenbrock".into()))?;
                let [lo, hi] = self.data.bounds.unwrap_or([-2.0, 2.0]);
                let seed = self.data.seed.unwrap_or(0);
                dal_core::data::generate_rosenbrock(samples, dim, lo, hi, seed)
                    .map_err(|e| Failure::Usage(e.to_string()))
            }
            other => Err(Failure::Usage(format!(
                "unknown data.source '{other}' (expected \"csv\" or \"rosenbrock\")"
            ))),
        }
    }

    /// Resolve the engine config against a loaded dataset.
    pub fn experiment_config(&self, ds: &Dataset) -> Result<ExperimentConfig, Failure> {
        let strategies: Vec<StrategyKind> = self
            .experiment
            .strategies
            .iter()
            .map(|s| s.parse())
            .collect::<dal_core::Result<_>>()
            .map_err(|e| Failure::Usage(e.to_string()))?;

        let network = NetworkSpec {
            input_dim: ds.n_features(),
            hidden_sizes: self.network.hidden.clone(),
            output_dim: 1,
            leakiness: self.network.leakiness,
            dropout_prob: self.network.dropout,
            l2_coeff: self.network.l2,
        };

        let cfg = ExperimentConfig {
            network,
            adam: AdamConfig {
                learning_rate: self.train.learning_rate,
                beta1: self.train.beta1,
                beta2: self.train.beta2,
                epsilon: self.train.epsilon,
            },
            mc: McConfig {
                num_runs: self.mc.runs,
                dropout_prob: self.mc.dropout,
                base_seed: 0,
            },
            strategies,
            replicates: self.experiment.replicates,
            samples_per_step: self.experiment.samples_per_step,
            budget: self.experiment.budget,
            split: SplitSpec {
                train_fraction: self.experiment.train_fraction,
                pool_fraction: self.experiment.pool_fraction,
                test_fraction: self.experiment.test_fraction,
                seed: 0,
            },
            initial_labeled: self.experiment.initial_labeled,
            epochs_base: self.train.epochs_base,
            epochs_retrain: self.train.epochs_retrain,
            warm_start: self.train.warm_start,
            batch_size: self.train.batch_size,
            standardize_targets: self.train.standardize_targets,
            master_seed: self.experiment.seed,
        };
        cfg.validate(ds).map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

pub fn parse_delimiter(raw: Option<&str>) -> Result<u8, Failure> {
    match raw {
        None => Ok(b','),
        Some(s) if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        Some(s) => Err(Failure::Usage(format!(
            "delimiter must be one ASCII character, got '{s}'"
        ))),
    }
}
