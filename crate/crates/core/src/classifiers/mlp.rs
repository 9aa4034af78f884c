//! Multilayer perceptron: ReLU hidden layers, softmax output, cross-entropy
//! loss, full-batch gradient descent.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    /// Hidden layer sizes, one or two entries.
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![16],
            learning_rate: 0.01,
            epochs: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// fan_in × fan_out
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<DenseLayer>,
    /// Training loss before each update, one entry per epoch.
    pub loss_trace: Vec<f64>,
}

/// Row-wise softmax with max subtraction.
pub fn softmax(z: ArrayView2<f64>) -> Array2<f64> {
    let mut out = z.to_owned();
    for mut row in out.rows_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row /= s;
    }
    out
}

/// Glorot-uniform weights, zero biases.
pub fn init_layers(sizes: &[usize], seed: u64) -> Vec<DenseLayer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-limit..=limit));
            DenseLayer {
                w,
                b: Array1::zeros(fan_out),
            }
        })
        .collect()
}

fn forward(layers: &[DenseLayer], x: ArrayView2<f64>) -> Vec<Array2<f64>> {
    let mut acts = vec![x.to_owned()];
    for (l, layer) in layers.iter().enumerate() {
        let mut z = acts[l].dot(&layer.w) + &layer.b;
        if l + 1 < layers.len() {
            z.mapv_inplace(|v| v.max(0.0));
        } else {
            z = softmax(z.view());
        }
        acts.push(z);
    }
    acts
}

/// Mean cross-entropy and its gradients, one (dW, db) pair per layer.
pub fn loss_and_gradients(
    layers: &[DenseLayer],
    x: ArrayView2<f64>,
    y: &[usize],
) -> (f64, Vec<(Array2<f64>, Array1<f64>)>) {
    let n = x.nrows() as f64;
    let acts = forward(layers, x);
    let probs = acts.last().unwrap();
    let loss = -y
        .iter()
        .enumerate()
        .map(|(i, &c)| probs[[i, c]].ln())
        .sum::<f64>()
        / n;

    let mut delta = probs.clone();
    for (i, &c) in y.iter().enumerate() {
        delta[[i, c]] -= 1.0;
    }
    delta /= n;

    let mut grads = Vec::with_capacity(layers.len());
    for l in (0..layers.len()).rev() {
        let dw = acts[l].t().dot(&delta);
        let db = delta.sum_axis(Axis(0));
        grads.push((dw, db));
        if l > 0 {
            let mut back = delta.dot(&layers[l].w.t());
            back.zip_mut_with(&acts[l], |g, &a| {
                if a <= 0.0 {
                    *g = 0.0;
                }
            });
            delta = back;
        }
    }
    grads.reverse();
    (loss, grads)
}

/// All weights then biases of every layer, in layer order.
pub fn flatten_params(layers: &[DenseLayer]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.w.iter());
        out.extend(l.b.iter());
    }
    out
}

pub fn unflatten_params(template: &[DenseLayer], flat: &[f64]) -> Vec<DenseLayer> {
    let mut pos = 0;
    template
        .iter()
        .map(|l| {
            let nw = l.w.len();
            let w = Array2::from_shape_vec(l.w.raw_dim(), flat[pos..pos + nw].to_vec()).unwrap();
            pos += nw;
            let nb = l.b.len();
            let b = Array1::from(flat[pos..pos + nb].to_vec());
            pos += nb;
            DenseLayer { w, b }
        })
        .collect()
}

pub fn flatten_gradients(grads: &[(Array2<f64>, Array1<f64>)]) -> Vec<f64> {
    let mut out = Vec::new();
    for (w, b) in grads {
        out.extend(w.iter());
        out.extend(b.iter());
    }
    out
}

impl Mlp {
    pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, params: &MlpParams, seed: u64) -> Result<Mlp> {
        if params.hidden.is_empty() || params.hidden.contains(&0) {
            return Err(Error::invalid("hidden", "need at least one non-empty hidden layer"));
        }
        if !(params.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be > 0"));
        }
        let mut sizes = vec![x.ncols()];
        sizes.extend(&params.hidden);
        sizes.push(n_classes.max(1));
        let mut layers = init_layers(&sizes, seed);
        let mut loss_trace = Vec::with_capacity(params.epochs);
        for epoch in 0..params.epochs {
            let (loss, grads) = loss_and_gradients(&layers, x, y);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            loss_trace.push(loss);
            for (layer, (dw, db)) in layers.iter_mut().zip(grads) {
                layer.w.scaled_add(-params.learning_rate, &dw);
                layer.b.scaled_add(-params.learning_rate, &db);
            }
        }
        Ok(Mlp { layers, loss_trace })
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Array2<f64> {
        forward(&self.layers, x).pop().unwrap()
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let p = self.predict_proba(row.insert_axis(Axis(0)));
        argmax_first(p.row(0))
    }
}

fn argmax_first(v: ArrayView1<f64>) -> usize {
    let mut best = 0;
    for (i, &s) in v.iter().enumerate() {
        if s > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_sum_to_one() {
        let z = array![[1000.0, 1001.0, -5.0], [0.0, 0.0, 0.0]];
        let p = softmax(z.view());
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let x = array![[0.0], [1.0]];
        let bad = MlpParams { hidden: vec![], ..Default::default() };
        assert!(Mlp::fit(x.view(), &[0, 1], 2, &bad, 0).is_err());
    }

    #[test]
    fn exploding_rate_reports_epoch() {
        let x = array![[f64::MAX, -f64::MAX], [-f64::MAX, f64::MAX]];
        let p = MlpParams { hidden: vec![4], learning_rate: 0.1, epochs: 5 };
        match Mlp::fit(x.view(), &[0, 1], 2, &p, 1) {
            Err(Error::NonFiniteLoss { .. }) => {}
            other => panic!("expected non-finite loss, got {other:?}"),
        }
    }
}
