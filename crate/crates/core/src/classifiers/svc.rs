//! One-vs-rest linear support vector classifier trained by SGD on the
//! L2-regularized hinge loss.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvcParams {
    pub lambda: f64,
    pub epochs: usize,
    /// Initial step; step t is eta0 / (1 + lambda·t).
    pub eta0: f64,
}

impl Default for SvcParams {
    fn default() -> Self {
        SvcParams {
            lambda: 1e-2,
            epochs: 200,
            eta0: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryHyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl BinaryHyperplane {
    pub fn decision(&self, row: ArrayView1<f64>) -> f64 {
        row.iter().zip(&self.w).map(|(x, w)| x * w).sum::<f64>() + self.b
    }
}

/// (λ/2)‖w‖² + mean hinge loss, labels in {−1, +1}.
pub fn hinge_objective(x: ArrayView2<f64>, y: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let reg = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = x
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yi)| {
            let s: f64 = row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            (1.0 - yi * s).max(0.0)
        })
        .sum();
    reg + loss / n
}

/// Trains a single ±1 scorer. The returned hyperplane is the end-of-epoch
/// iterate with the lowest objective, starting from w = 0.
pub fn fit_binary(x: ArrayView2<f64>, y: &[f64], params: &SvcParams, seed: u64) -> BinaryHyperplane {
    let (n, d) = x.dim();
    let mut w = Array1::<f64>::zeros(d);
    let mut b = 0.0;
    let mut best_obj = hinge_objective(x, y, w.as_slice().unwrap(), b, params.lambda);
    let mut best = BinaryHyperplane { w: w.to_vec(), b };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = params.eta0 / (1.0 + params.lambda * t as f64);
            let row = x.row(i);
            let margin = y[i] * (row.dot(&w) + b);
            w *= 1.0 - eta * params.lambda;
            if margin < 1.0 {
                w.scaled_add(eta * y[i], &row);
                b += eta * y[i];
            }
            t += 1;
        }
        let obj = hinge_objective(x, y, w.as_slice().unwrap(), b, params.lambda);
        if obj < best_obj {
            best_obj = obj;
            best = BinaryHyperplane { w: w.to_vec(), b };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvc {
    /// One scorer per class index; empty for a single-class model.
    pub planes: Vec<BinaryHyperplane>,
}

impl LinearSvc {
    pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, params: &SvcParams, seed: u64) -> Self {
        if n_classes < 2 {
            return LinearSvc { planes: Vec::new() };
        }
        let planes = (0..n_classes)
            .map(|k| {
                let yk: Vec<f64> = y.iter().map(|&c| if c == k { 1.0 } else { -1.0 }).collect();
                fit_binary(x, &yk, params, seed.wrapping_add(k as u64))
            })
            .collect();
        LinearSvc { planes }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, p) in self.planes.iter().enumerate() {
            let s = p.decision(row);
            if s > best.1 {
                best = (k, s);
            }
        }
        best.0
    }
}
