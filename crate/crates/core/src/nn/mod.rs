//! From-scratch fully-connected regression network.
//!
//! A [`Network`] is a chain of affine layers with leaky-ReLU activations on
//! the hidden layers and a linear scalar output. Dropout uses the inverted
//! convention: during a masked pass every kept hidden activation is rescaled
//! by `1/(1 - dropout_prob)`, so a mask-free pass needs no correction and a
//! zero dropout probability reproduces the deterministic forward exactly.

mod checkpoint;
mod dropout;
mod grad;
mod optimizer;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use dropout::DropoutMask;
pub use grad::{gradients, loss, loss_with_mask, Gradients};
pub(crate) use grad::loss_and_gradients;
pub use optimizer::{AdamConfig, AdamState};
pub use train::{train, TrainOptions};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Architecture and regularization hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
    pub output_dim: usize,
    /// Negative-side slope of the leaky rectifier.
    pub leakiness: f64,
    /// Probability of dropping a hidden unit during a masked pass.
    pub dropout_prob: f64,
    /// Coefficient of the L2 penalty on weights (biases excluded).
    pub l2_coeff: f64,
}

impl NetworkSpec {
    /// Spec with the default 256-128-64 architecture.
    pub fn new(input_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_sizes: vec![256, 128, 64],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.5,
            l2_coeff: 1e-5,
        }
    }

    pub fn with_hidden(mut self, hidden_sizes: Vec<usize>) -> Self {
        self.hidden_sizes = hidden_sizes;
        self
    }

    pub fn with_dropout(mut self, dropout_prob: f64) -> Self {
        self.dropout_prob = dropout_prob;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("input_dim must be >= 1".into()));
        }
        if self.output_dim != 1 {
            return Err(Error::Config(
                "only scalar regression (output_dim = 1) is supported".into(),
            ));
        }
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(Error::Config(
                "hidden_sizes must be non-empty with all widths >= 1".into(),
            ));
        }
        if !self.dropout_prob.is_finite() || !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(Error::Config(format!(
                "dropout_prob must be in [0, 1), got {}",
                self.dropout_prob
            )));
        }
        if !self.leakiness.is_finite() || self.leakiness <= 0.0 {
            return Err(Error::Config(format!(
                "leakiness must be > 0, got {}",
                self.leakiness
            )));
        }
        if !self.l2_coeff.is_finite() || self.l2_coeff < 0.0 {
            return Err(Error::Config(format!(
                "l2_coeff must be >= 0, got {}",
                self.l2_coeff
            )));
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` of every affine layer, input to output.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_sizes.len() + 1);
        let mut prev = self.input_dim;
        for &h in &self.hidden_sizes {
            dims.push((prev, h));
            prev = h;
        }
        dims.push((prev, self.output_dim));
        dims
    }

    /// Total number of weights and biases.
    pub fn param_count(&self) -> usize {
        self.layer_dims()
            .iter()
            .map(|(fan_in, fan_out)| fan_in * fan_out + fan_out)
            .sum()
    }
}

/// Elementwise leaky rectifier.
pub fn leaky_relu(z: f64, leakiness: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        leakiness * z
    }
}

pub(crate) fn leaky_relu_grad(z: f64, leakiness: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        leakiness
    }
}

/// A trained or trainable network: spec plus per-layer weights and biases.
///
/// Immutable during prediction; cloning gives an independent copy for the
/// weight-sharing protocol used by paired experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    spec: NetworkSpec,
    /// One `(fan_out, fan_in)` matrix per layer.
    pub(crate) weights: Vec<Array2<f64>>,
    pub(crate) biases: Vec<Array1<f64>>,
}

impl Network {
    /// Initialize with zero biases and symmetric uniform weights scaled for
    /// the leaky rectifier: variance `2 / (fan_in * (1 + leakiness^2))`.
    pub fn init(spec: NetworkSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (layer, (fan_in, fan_out)) in spec.layer_dims().into_iter().enumerate() {
            let mut r = rng::stream(seed, &[layer as u64]);
            let limit = (6.0 / (fan_in as f64 * (1.0 + spec.leakiness * spec.leakiness))).sqrt();
            weights.push(Array2::from_shape_fn((fan_out, fan_in), |_| {
                use rand::Rng;
                r.random_range(-limit..limit)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Self {
            spec,
            weights,
            biases,
        })
    }

    /// Rebuild from raw parts, checking the shape chain and finiteness.
    pub fn from_parts(
        spec: NetworkSpec,
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self> {
        spec.validate()?;
        let dims = spec.layer_dims();
        if weights.len() != dims.len() || biases.len() != dims.len() {
            return Err(Error::Shape(format!(
                "expected {} layers, got {} weight / {} bias tensors",
                dims.len(),
                weights.len(),
                biases.len()
            )));
        }
        for (layer, (fan_in, fan_out)) in dims.iter().enumerate() {
            if weights[layer].dim() != (*fan_out, *fan_in) {
                return Err(Error::Shape(format!(
                    "layer {layer} weights are {:?}, expected ({fan_out}, {fan_in})",
                    weights[layer].dim()
                )));
            }
            if biases[layer].len() != *fan_out {
                return Err(Error::Shape(format!(
                    "layer {layer} biases have length {}, expected {fan_out}",
                    biases[layer].len()
                )));
            }
        }
        if weights.iter().any(|w| w.iter().any(|v| !v.is_finite()))
            || biases.iter().any(|b| b.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Config("network parameters must be finite".into()));
        }
        Ok(Self {
            spec,
            weights,
            biases,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn param_count(&self) -> usize {
        self.spec.param_count()
    }

    /// Sum of squared weights, the L2 penalty base (biases excluded).
    pub fn weight_square_sum(&self) -> f64 {
        self.weights
            .iter()
            .map(|w| w.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    fn check_mask(&self, mask: &DropoutMask) -> Result<()> {
        let widths: Vec<usize> = mask.layers().iter().map(|l| l.len()).collect();
        if widths != self.spec.hidden_sizes {
            return Err(Error::Shape(format!(
                "mask widths {:?} do not match hidden sizes {:?}",
                widths, self.spec.hidden_sizes
            )));
        }
        Ok(())
    }

    /// Predict a single point. With a mask, each hidden activation vector is
    /// multiplied elementwise by the mask and rescaled by `1/keep_prob`; the
    /// output layer is linear and never masked.
    pub fn forward(&self, x: ArrayView1<'_, f64>, mask: Option<&DropoutMask>) -> Result<f64> {
        if x.len() != self.spec.input_dim {
            return Err(Error::Shape(format!(
                "input has length {}, expected {}",
                x.len(),
                self.spec.input_dim
            )));
        }
        if let Some(m) = mask {
            self.check_mask(m)?;
        }
        let n_hidden = self.spec.hidden_sizes.len();
        let mut a = x.to_owned();
        for l in 0..n_hidden {
            let mut z = self.weights[l].dot(&a);
            z += &self.biases[l];
            z.mapv_inplace(|v| leaky_relu(v, self.spec.leakiness));
            if let Some(m) = mask {
                z *= &m.layers()[l];
                z *= m.scale();
            }
            a = z;
        }
        let out = self.weights[n_hidden].dot(&a) + &self.biases[n_hidden];
        Ok(out[0])
    }

    /// Predict every row of `x`.
    pub fn forward_batch(
        &self,
        x: ArrayView2<'_, f64>,
        mask: Option<&DropoutMask>,
    ) -> Result<Array1<f64>> {
        if x.ncols() != self.spec.input_dim {
            return Err(Error::Shape(format!(
                "input has {} columns, expected {}",
                x.ncols(),
                self.spec.input_dim
            )));
        }
        if let Some(m) = mask {
            self.check_mask(m)?;
        }
        let n_hidden = self.spec.hidden_sizes.len();
        let mut a = x.to_owned();
        for l in 0..n_hidden {
            let mut z = a.dot(&self.weights[l].t());
            z += &self.biases[l];
            z.mapv_inplace(|v| leaky_relu(v, self.spec.leakiness));
            if let Some(m) = mask {
                z *= &m.layers()[l];
                z *= m.scale();
            }
            a = z;
        }
        let out = a.dot(&self.weights[n_hidden].t()) + &self.biases[n_hidden];
        Ok(out.column(0).to_owned())
    }
}
