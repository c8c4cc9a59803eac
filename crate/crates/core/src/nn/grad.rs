//! Loss and exact backpropagation gradients.
//!
//! The training objective is the mean squared residual over the batch plus
//! `l2_coeff` times the sum of squared weights (biases are not penalized).
//! Under a fixed dropout mask the masked factor `mask * 1/keep_prob` is part
//! of the forward function, so dropped units receive zero gradient through
//! the masked path.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

use super::{leaky_relu, leaky_relu_grad, DropoutMask, Network};

/// Per-parameter gradient set, shaped like the network it came from.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

fn check_batch(net: &Network, x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::Empty("batch must contain at least one row".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} feature rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() != net.spec().input_dim {
        return Err(Error::Shape(format!(
            "input has {} columns, expected {}",
            x.ncols(),
            net.spec().input_dim
        )));
    }
    Ok(())
}

/// Mean squared residual plus the L2 weight penalty, mask-free.
pub fn loss(net: &Network, x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<f64> {
    loss_with_mask(net, x, y, None)
}

/// Same objective evaluated under a fixed dropout mask.
pub fn loss_with_mask(
    net: &Network,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    mask: Option<&DropoutMask>,
) -> Result<f64> {
    check_batch(net, x, y)?;
    let preds = net.forward_batch(x, mask)?;
    let n = x.nrows() as f64;
    let data = preds
        .iter()
        .zip(y.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n;
    Ok(data + net.spec().l2_coeff * net.weight_square_sum())
}

/// Exact gradient of [`loss_with_mask`] with respect to every parameter.
pub fn gradients(
    net: &Network,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    mask: Option<&DropoutMask>,
) -> Result<Gradients> {
    Ok(loss_and_gradients(net, x, y, mask)?.1)
}

/// One combined forward/backward pass returning `(loss, gradients)`.
pub(crate) fn loss_and_gradients(
    net: &Network,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    mask: Option<&DropoutMask>,
) -> Result<(f64, Gradients)> {
    check_batch(net, x, y)?;
    if let Some(m) = mask {
        net.check_mask(m)?;
    }
    let spec = net.spec();
    let n_hidden = spec.hidden_sizes.len();
    let n = x.nrows() as f64;
    let alpha = spec.l2_coeff;

    // forward, keeping pre-activations and post-mask activations
    let mut activations: Vec<Array2<f64>> = Vec::with_capacity(n_hidden + 1);
    activations.push(x.to_owned());
    let mut pre_acts: Vec<Array2<f64>> = Vec::with_capacity(n_hidden);
    for l in 0..n_hidden {
        let mut z = activations[l].dot(&net.weights[l].t());
        z += &net.biases[l];
        pre_acts.push(z.clone());
        z.mapv_inplace(|v| leaky_relu(v, spec.leakiness));
        if let Some(m) = mask {
            z *= &m.layers()[l];
            z *= m.scale();
        }
        activations.push(z);
    }
    let preds = activations[n_hidden].dot(&net.weights[n_hidden].t()) + &net.biases[n_hidden];
    let preds = preds.column(0).to_owned();

    let residuals = &preds - &y;
    let data_loss = residuals.iter().map(|r| r * r).sum::<f64>() / n;
    let total_loss = data_loss + alpha * net.weight_square_sum();

    let mut grad_w: Vec<Array2<f64>> = vec![Array2::zeros((0, 0)); n_hidden + 1];
    let mut grad_b: Vec<Array1<f64>> = vec![Array1::zeros(0); n_hidden + 1];

    // output layer: d loss / d pred = 2 r / n
    let delta_out = residuals.mapv(|r| 2.0 * r / n).insert_axis(Axis(1));
    grad_w[n_hidden] = delta_out.t().dot(&activations[n_hidden]) + &(2.0 * alpha * &net.weights[n_hidden]);
    grad_b[n_hidden] = delta_out.sum_axis(Axis(0));

    let mut upstream = delta_out.dot(&net.weights[n_hidden]);
    for l in (0..n_hidden).rev() {
        // through the mask, then the activation
        let mut delta = upstream;
        if let Some(m) = mask {
            delta *= &m.layers()[l];
            delta *= m.scale();
        }
        ndarray::Zip::from(&mut delta)
            .and(&pre_acts[l])
            .for_each(|d, &z| *d *= leaky_relu_grad(z, spec.leakiness));

        grad_w[l] = delta.t().dot(&activations[l]) + &(2.0 * alpha * &net.weights[l]);
        grad_b[l] = delta.sum_axis(Axis(0));
        upstream = delta.dot(&net.weights[l]);
    }

    Ok((
        total_loss,
        Gradients {
            weights: grad_w,
            biases: grad_b,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkSpec;
    use crate::rng;
    use ndarray::{array, Array2};
    use rand::Rng;

    fn random_batch(rows: usize, cols: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
        let mut r = rng::stream(seed, &[99]);
        let x = Array2::from_shape_fn((rows, cols), |_| r.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(rows, |_| r.random_range(-1.0..1.0));
        (x, y)
    }

    /// Central finite-difference gradient of the masked loss. Test-only
    /// oracle, independent of the backprop path.
    fn finite_difference(
        net: &Network,
        x: ArrayView2<'_, f64>,
        y: ArrayView1<'_, f64>,
        mask: Option<&DropoutMask>,
    ) -> Gradients {
        let h = 1e-5;
        let mut grad_w = Vec::new();
        let mut grad_b = Vec::new();
        for layer in 0..net.weights.len() {
            let mut gw = Array2::zeros(net.weights[layer].dim());
            for idx in ndarray::indices(net.weights[layer].dim()) {
                let mut plus = net.clone();
                plus.weights[layer][idx] += h;
                let mut minus = net.clone();
                minus.weights[layer][idx] -= h;
                gw[idx] = (loss_with_mask(&plus, x, y, mask).unwrap()
                    - loss_with_mask(&minus, x, y, mask).unwrap())
                    / (2.0 * h);
            }
            grad_w.push(gw);
            let mut gb = Array1::zeros(net.biases[layer].len());
            for i in 0..net.biases[layer].len() {
                let mut plus = net.clone();
                plus.biases[layer][i] += h;
                let mut minus = net.clone();
                minus.biases[layer][i] -= h;
                gb[i] = (loss_with_mask(&plus, x, y, mask).unwrap()
                    - loss_with_mask(&minus, x, y, mask).unwrap())
                    / (2.0 * h);
            }
            grad_b.push(gb);
        }
        Gradients {
            weights: grad_w,
            biases: grad_b,
        }
    }

    fn max_rel_err(a: &Gradients, b: &Gradients) -> f64 {
        let mut worst: f64 = 0.0;
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            for (x, y) in wa.iter().zip(wb.iter()) {
                worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
            }
        }
        for (ba, bb) in a.biases.iter().zip(&b.biases) {
            for (x, y) in ba.iter().zip(bb.iter()) {
                worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
            }
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let spec = NetworkSpec {
            input_dim: 2,
            hidden_sizes: vec![8],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.5,
            l2_coeff: 1e-4,
        };
        let net = Network::init(spec, 17).unwrap();
        let (x, y) = random_batch(5, 2, 3);
        let mut r = rng::stream(4, &[]);
        let mask = DropoutMask::sample(&[8], 0.5, &mut r).unwrap();
        for m in [None, Some(&mask)] {
            let analytic = gradients(&net, x.view(), y.view(), m).unwrap();
            let numeric = finite_difference(&net, x.view(), y.view(), m);
            let err = max_rel_err(&analytic, &numeric);
            assert!(err < 1e-5, "relative error {err}");
        }
    }

    #[test]
    fn dropped_unit_gets_zero_incoming_gradient() {
        let spec = NetworkSpec::new(2).with_hidden(vec![3]);
        let net = Network::init(spec, 5).unwrap();
        let (x, y) = random_batch(4, 2, 8);
        let mask = DropoutMask::from_layers(vec![array![1.0, 0.0, 1.0]], 0.5).unwrap();
        let g = gradients(&net, x.view(), y.view(), Some(&mask)).unwrap();
        // unit 1 is dropped: its incoming weight row and bias see no signal
        // (only the L2 term remains on the weights, which is zero-free here
        // because l2_coeff includes it -- subtract it out first)
        let alpha = net.spec().l2_coeff;
        for j in 0..2 {
            let pure = g.weights[0][(1, j)] - 2.0 * alpha * net.weights()[0][(1, j)];
            assert!(pure.abs() < 1e-15);
        }
        assert_eq!(g.biases[0][1], 0.0);
    }

    #[test]
    fn zero_residual_gradient_is_pure_regularizer() {
        // build a net, compute its own predictions as targets: residuals are 0
        let spec = NetworkSpec {
            input_dim: 2,
            hidden_sizes: vec![4],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.0,
            l2_coeff: 1e-3,
        };
        let net = Network::init(spec, 21).unwrap();
        let (x, _) = random_batch(6, 2, 2);
        let y = net.forward_batch(x.view(), None).unwrap();
        let g = gradients(&net, x.view(), y.view(), None).unwrap();
        for (gw, w) in g.weights.iter().zip(net.weights()) {
            for (a, b) in gw.iter().zip(w.iter()) {
                assert!((a - 2.0 * 1e-3 * b).abs() < 1e-12);
            }
        }
        for gb in &g.biases {
            assert!(gb.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn loss_examples() {
        let spec = NetworkSpec {
            input_dim: 1,
            hidden_sizes: vec![1],
            output_dim: 1,
            leakiness: 0.01,
            dropout_prob: 0.0,
            l2_coeff: 0.0,
        };
        // identity chain: pred = x
        let net = Network::from_parts(
            spec.clone(),
            vec![array![[1.0]], array![[1.0]]],
            vec![array![0.0], array![0.0]],
        )
        .unwrap();
        // perfect predictions -> 0
        let x = array![[1.0], [2.0]];
        assert_eq!(loss(&net, x.view(), array![1.0, 2.0].view()).unwrap(), 0.0);
        // residuals [1, -1] -> mean of squares 1
        assert_eq!(loss(&net, x.view(), array![0.0, 3.0].view()).unwrap(), 1.0);

        // regularizer-only: zero residuals, alpha 1e-5, sum of squared weights 2
        let mut reg_spec = spec;
        reg_spec.l2_coeff = 1e-5;
        let net = Network::from_parts(
            reg_spec,
            vec![array![[1.0]], array![[1.0]]],
            vec![array![0.0], array![0.0]],
        )
        .unwrap();
        let l = loss(&net, x.view(), array![1.0, 2.0].view()).unwrap();
        assert!((l - 2e-5).abs() < 1e-18);
    }

    #[test]
    fn empty_batch_is_an_error() {
        let net = Network::init(NetworkSpec::new(2).with_hidden(vec![2]), 0).unwrap();
        let x = Array2::<f64>::zeros((0, 2));
        let y = Array1::<f64>::zeros(0);
        assert!(matches!(
            loss(&net, x.view(), y.view()),
            Err(Error::Empty(_))
        ));
    }
}
