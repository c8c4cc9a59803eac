//! Adaptive-moment gradient optimizer with bias correction.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Config(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !b.is_finite() || !(0.0..1.0).contains(&b) {
                return Err(Error::Config(format!("{name} must be in [0, 1), got {b}")));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// First/second moment accumulators, one tensor per parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    m_weights: Vec<Array2<f64>>,
    v_weights: Vec<Array2<f64>>,
    m_biases: Vec<Array1<f64>>,
    v_biases: Vec<Array1<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(net: &Network, config: AdamConfig) -> Self {
        Self {
            config,
            m_weights: net.weights().iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_weights: net.weights().iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_biases: net.biases().iter().map(|b| Array1::zeros(b.len())).collect(),
            v_biases: net.biases().iter().map(|b| Array1::zeros(b.len())).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Apply one update in place. Rejects non-finite gradients so divergence
    /// surfaces instead of corrupting the parameters.
    pub fn apply(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::NonFiniteGradient);
        }
        self.step += 1;
        let c = &self.config;
        let bias1 = 1.0 - c.beta1.powi(self.step as i32);
        let bias2 = 1.0 - c.beta2.powi(self.step as i32);

        for l in 0..net.weights.len() {
            update_tensor(
                net.weights[l].iter_mut(),
                grads.weights[l].iter(),
                self.m_weights[l].iter_mut(),
                self.v_weights[l].iter_mut(),
                c,
                bias1,
                bias2,
            );
            update_tensor(
                net.biases[l].iter_mut(),
                grads.biases[l].iter(),
                self.m_biases[l].iter_mut(),
                self.v_biases[l].iter_mut(),
                c,
                bias1,
                bias2,
            );
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn update_tensor<'a>(
    params: impl Iterator<Item = &'a mut f64>,
    grads: impl Iterator<Item = &'a f64>,
    ms: impl Iterator<Item = &'a mut f64>,
    vs: impl Iterator<Item = &'a mut f64>,
    c: &AdamConfig,
    bias1: f64,
    bias2: f64,
) {
    for (((p, &g), m), v) in params.zip(grads).zip(ms).zip(vs) {
        *m = c.beta1 * *m + (1.0 - c.beta1) * g;
        *v = c.beta2 * *v + (1.0 - c.beta2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *p -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
    }
}
