//! Shuffled mini-batch training with a fresh dropout mask per batch.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::{loss_and_gradients, AdamConfig, AdamState, DropoutMask, Network};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            epochs: 10_000,
            batch_size: 64,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        self.adam.validate()
    }
}

/// Train a copy of `net` on `(x, y)` and return it. Each epoch shuffles the
/// rows; each batch samples a fresh dropout mask (none when the spec's
/// dropout probability is zero). Deterministic for a fixed seed.
pub fn train(
    net: &Network,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    opts: &TrainOptions,
) -> Result<Network> {
    opts.validate()?;
    let mut net = net.clone();
    if opts.epochs == 0 {
        return Ok(net);
    }
    if x.nrows() == 0 {
        return Err(Error::Empty("training set is empty".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} feature rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }

    let dropout = net.spec().dropout_prob;
    let hidden = net.spec().hidden_sizes.clone();
    let mut state = AdamState::new(&net, opts.adam);
    let mut rng = rng::stream(opts.seed, &[]);
    let mut order: Vec<usize> = (0..x.nrows()).collect();

    for epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        for batch_idx in order.chunks(opts.batch_size) {
            let xb: Array2<f64> = x.select(Axis(0), batch_idx);
            let yb: Array1<f64> = batch_idx.iter().map(|&i| y[i]).collect();
            let mask = if dropout > 0.0 {
                Some(DropoutMask::sample(&hidden, dropout, &mut rng)?)
            } else {
                None
            };
            let (batch_loss, grads) =
                loss_and_gradients(&net, xb.view(), yb.view(), mask.as_ref())?;
            if !batch_loss.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    detail: format!("non-finite loss {batch_loss}"),
                });
            }
            state.apply(&mut net, &grads).map_err(|e| match e {
                Error::NonFiniteGradient => Error::Divergence {
                    epoch,
                    detail: "non-finite gradient".into(),
                },
                other => other,
            })?;
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkSpec;
    use ndarray::Array2;

    fn line_data(n: usize) -> (Array2<f64>, Array1<f64>) {
        let x = Array2::from_shape_fn((n, 1), |(i, _)| -1.0 + 2.0 * i as f64 / (n - 1) as f64);
        let y = x.column(0).mapv(|v| 2.0 * v);
        (x, y)
    }

    #[test]
    fn zero_epochs_returns_network_unchanged() {
        let net = Network::init(NetworkSpec::new(1).with_hidden(vec![4]), 0).unwrap();
        let (x, y) = line_data(8);
        let opts = TrainOptions {
            epochs: 0,
            ..TrainOptions::default()
        };
        let trained = train(&net, x.view(), y.view(), &opts).unwrap();
        assert_eq!(trained, net);
    }

    #[test]
    fn fits_a_line_without_dropout() {
        let spec = NetworkSpec {
            input_dim: 1,
            hidden_sizes: vec![4],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.0,
            l2_coeff: 0.0,
        };
        let net = Network::init(spec, 3).unwrap();
        let (x, y) = line_data(32);
        let opts = TrainOptions {
            epochs: 2000,
            batch_size: 8,
            seed: 5,
            adam: AdamConfig {
                learning_rate: 0.01,
                ..AdamConfig::default()
            },
        };
        let trained = train(&net, x.view(), y.view(), &opts).unwrap();
        let preds = trained.forward_batch(x.view(), None).unwrap();
        let rmse = (preds
            .iter()
            .zip(y.iter())
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            / x.nrows() as f64)
            .sqrt();
        assert!(rmse < 0.01, "train rmse {rmse}");
    }

    #[test]
    fn training_is_seed_deterministic() {
        let spec = NetworkSpec {
            input_dim: 1,
            hidden_sizes: vec![6],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.3,
            l2_coeff: 1e-5,
        };
        let net = Network::init(spec, 7).unwrap();
        let (x, y) = line_data(16);
        let opts = TrainOptions {
            epochs: 50,
            batch_size: 4,
            seed: 11,
            adam: AdamConfig::default(),
        };
        let a = train(&net, x.view(), y.view(), &opts).unwrap();
        let b = train(&net, x.view(), y.view(), &opts).unwrap();
        assert_eq!(a, b);
        let c = train(
            &net,
            x.view(),
            y.view(),
            &TrainOptions { seed: 12, ..opts },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn divergence_carries_the_epoch() {
        let spec = NetworkSpec {
            input_dim: 1,
            hidden_sizes: vec![2],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.0,
            l2_coeff: 0.0,
        };
        let net = Network::init(spec, 1).unwrap();
        // residual around 1e200 squares to infinity
        let x = Array2::from_elem((4, 1), 1.0);
        let y = Array1::from_elem(4, 1e200);
        let err = train(&net, x.view(), y.view(), &TrainOptions::default()).unwrap_err();
        match err {
            Error::Divergence { epoch, .. } => assert_eq!(epoch, 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
