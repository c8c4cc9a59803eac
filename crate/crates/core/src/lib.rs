//! Dropout-based active learning engine for regression.
//!
//! The engine trains a fully-connected regression network with dropout and
//! L2 regularization, scores unlabeled pool points by the sample standard
//! deviation of repeated stochastic dropout forward passes (MC dropout
//! uncertainty), annotates the most uncertain points, and retrains. Random
//! sampling and greedy/batch max-min (farthest point) selection are provided
//! as baselines, together with error-ratio curves and Dolan-More performance
//! profiles for comparing strategies across experiments.
//!
//! Modules:
//!
//! - [`nn`]: the from-scratch network (forward, backprop, Adam, training).
//! - [`mcdue`]: MC-dropout uncertainty scores and top-m selection.
//! - [`acquisition`]: random and max-min baseline selectors.
//! - [`experiment`]: the active-learning loop and paired-replicate protocol.
//! - [`data`]: CSV ingestion, splits, standardization, Rosenbrock generator.
//! - [`analysis`]: RMSE/MAE/MaxAE, ratio curves, Dolan-More profiles, and
//!   the uncertainty-vs-error diagnostic.
//! - [`record`]: experiment record persistence (CSV, checkpoints).
//! - [`plot`]: minimal SVG renderers for the above.
//!
//! All randomness flows through explicitly derived [`rng`] streams, so a run
//! is reproducible bit-for-bit regardless of worker count.

pub mod acquisition;
pub mod analysis;
pub mod data;
pub mod error;
pub mod experiment;
pub mod mcdue;
pub mod nn;
pub mod plot;
pub mod record;
pub mod rng;

pub use acquisition::StrategyKind;
pub use analysis::{MetricKind, MetricsRecord};
pub use data::{Dataset, SplitSpec, Standardizer};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentResult};
pub use mcdue::McConfig;
pub use nn::{DropoutMask, Network, NetworkSpec};
