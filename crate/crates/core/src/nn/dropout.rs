//! Bernoulli keep/drop masks for the hidden layers.

use ndarray::Array1;
use rand::Rng;

use crate::error::{Error, Result};

/// One keep/drop realization per hidden layer. Entries are 0.0 or 1.0 so the
/// mask can be applied as an elementwise product.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask {
    layers: Vec<Array1<f64>>,
    keep_prob: f64,
}

impl DropoutMask {
    /// Sample a fresh mask: each unit is kept with probability
    /// `1 - dropout_prob`.
    pub fn sample(
        hidden_sizes: &[usize],
        dropout_prob: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if !dropout_prob.is_finite() || !(0.0..1.0).contains(&dropout_prob) {
            return Err(Error::Config(format!(
                "dropout_prob must be in [0, 1), got {dropout_prob}"
            )));
        }
        let keep_prob = 1.0 - dropout_prob;
        let layers = hidden_sizes
            .iter()
            .map(|&w| {
                Array1::from_shape_fn(w, |_| {
                    if rng.random::<f64>() < keep_prob {
                        1.0
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        Ok(Self { layers, keep_prob })
    }

    /// Build a mask from explicit 0/1 layer vectors.
    pub fn from_layers(layers: Vec<Array1<f64>>, dropout_prob: f64) -> Result<Self> {
        if !dropout_prob.is_finite() || !(0.0..1.0).contains(&dropout_prob) {
            return Err(Error::Config(format!(
                "dropout_prob must be in [0, 1), got {dropout_prob}"
            )));
        }
        if layers
            .iter()
            .any(|l| l.iter().any(|v| *v != 0.0 && *v != 1.0))
        {
            return Err(Error::Config("mask entries must be 0 or 1".into()));
        }
        Ok(Self {
            layers,
            keep_prob: 1.0 - dropout_prob,
        })
    }

    /// All `2^width` masks for a single hidden layer, in binary counting
    /// order. Intended for exhaustive checks on small layers.
    pub fn enumerate_single_layer(width: usize, dropout_prob: f64) -> Result<Vec<Self>> {
        if width > 16 {
            return Err(Error::Config(format!(
                "mask enumeration is limited to 16 units, got {width}"
            )));
        }
        (0..(1usize << width))
            .map(|bits| {
                let layer = Array1::from_shape_fn(width, |u| ((bits >> u) & 1) as f64);
                Self::from_layers(vec![layer], dropout_prob)
            })
            .collect()
    }

    pub fn layers(&self) -> &[Array1<f64>] {
        &self.layers
    }

    pub fn keep_prob(&self) -> f64 {
        self.keep_prob
    }

    /// Inverted-dropout rescale factor applied to kept activations.
    pub fn scale(&self) -> f64 {
        1.0 / self.keep_prob
    }
}
