//! Multitask Lasso: (1/2n)‖Y − XW − 1bᵀ‖²_F + α Σ_i ‖W_i‖₂, solved by block
//! coordinate descent over the rows of W with group soft-thresholding.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoParams {
    pub alpha: f64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoParams {
    fn default() -> Self {
        LassoParams {
            alpha: 0.1,
            tol: 1e-6,
            max_sweeps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultitaskLassoFit {
    /// d × c
    pub w: Array2<f64>,
    pub intercept: Vec<f64>,
    pub alpha: f64,
    /// Objective before the first sweep, then after every sweep.
    pub objective_trace: Vec<f64>,
}

impl MultitaskLassoFit {
    pub fn scores(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut s = x.dot(&self.w);
        for mut row in s.rows_mut() {
            row += &Array1::from(self.intercept.clone());
        }
        s
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        self.w
            .rows()
            .into_iter()
            .enumerate()
            .filter(|(_, r)| r.iter().all(|&v| v == 0.0))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Σ_i ‖row i‖₂.
pub fn l21_norm(w: ArrayView2<f64>) -> f64 {
    w.rows().into_iter().map(|r| r.dot(&r).sqrt()).sum()
}

/// Objective value including the intercept term.
pub fn multitask_lasso_objective(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    w: ArrayView2<f64>,
    intercept: &[f64],
    alpha: f64,
) -> f64 {
    let n = x.nrows() as f64;
    let mut r = y.to_owned() - x.dot(&w);
    for mut row in r.rows_mut() {
        row -= &ndarray::ArrayView1::from(intercept);
    }
    r.iter().map(|v| v * v).sum::<f64>() / (2.0 * n) + alpha * l21_norm(w)
}

/// Smallest α for which the all-zero W is optimal: max_i ‖x̃_iᵀ Ỹ‖₂ / n on
/// centered data.
pub fn critical_alpha(x: ArrayView2<f64>, y: ArrayView2<f64>) -> f64 {
    let n = x.nrows() as f64;
    let (xc, _) = center(x);
    let (yc, _) = center(y);
    xc.t()
        .dot(&yc)
        .rows()
        .into_iter()
        .map(|r| r.dot(&r).sqrt() / n)
        .fold(0.0, f64::max)
}

fn center(a: ArrayView2<f64>) -> (Array2<f64>, Array1<f64>) {
    let mean = a.mean_axis(Axis(0)).expect("non-empty");
    (&a - &mean, mean)
}

/// Block coordinate descent. Stops when the largest row change in a sweep
/// is below `tol` or after `max_sweeps` sweeps.
pub fn fit_multitask_lasso(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    alpha: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<MultitaskLassoFit> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid("alpha", format!("must be ≥ 0 (got {alpha})")));
    }
    if x.nrows() != y.nrows() || x.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            context: "lasso X rows vs Y rows".into(),
            expected: x.nrows(),
            actual: y.nrows(),
        });
    }
    let n = x.nrows() as f64;
    let (d, c) = (x.ncols(), y.ncols());
    let (xc, x_mean) = center(x);
    let (yc, y_mean) = center(y);
    let col_sq: Vec<f64> = xc.columns().into_iter().map(|col| col.dot(&col)).collect();

    let mut w = Array2::<f64>::zeros((d, c));
    let mut resid = yc.clone();
    let objective = |resid: &Array2<f64>, w: &Array2<f64>| {
        resid.iter().map(|v| v * v).sum::<f64>() / (2.0 * n) + alpha * l21_norm(w.view())
    };
    let mut trace = vec![objective(&resid, &w)];

    for _ in 0..max_sweeps {
        let mut max_change: f64 = 0.0;
        for i in 0..d {
            if col_sq[i] == 0.0 {
                continue;
            }
            let xi = xc.column(i);
            let old = w.row(i).to_owned();
            // g = x_iᵀ (R + x_i W_i)
            let g = xi.dot(&resid) + &old * col_sq[i];
            let g_norm = g.dot(&g).sqrt();
            let shrink = if g_norm > 0.0 {
                (1.0 - alpha * n / g_norm).max(0.0)
            } else {
                0.0
            };
            let new = if shrink > 0.0 {
                g * (shrink / col_sq[i])
            } else {
                Array1::zeros(c)
            };
            let delta = &new - &old;
            let change = delta.dot(&delta).sqrt();
            if change > 0.0 {
                // R -= x_i Δᵀ
                for (mut r_row, &xv) in resid.rows_mut().into_iter().zip(xi.iter()) {
                    r_row.scaled_add(-xv, &delta);
                }
                w.row_mut(i).assign(&new);
            }
            max_change = max_change.max(change);
        }
        trace.push(objective(&resid, &w));
        if max_change < tol {
            break;
        }
    }

    let intercept = (&y_mean - &x_mean.dot(&w)).to_vec();
    Ok(MultitaskLassoFit {
        w,
        intercept,
        alpha,
        objective_trace: trace,
    })
}

/// Checks that every row of `y` is a one-hot vector.
pub fn check_one_hot(y: ArrayView2<f64>) -> Result<()> {
    for (i, row) in y.rows().into_iter().enumerate() {
        let ones = row.iter().filter(|&&v| v == 1.0).count();
        let zeros = row.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != row.len() {
            return Err(Error::Data(format!("target row {i} is not one-hot")));
        }
    }
    Ok(())
}

pub fn one_hot(y: &[usize], n_classes: usize) -> Array2<f64> {
    let mut out = Array2::zeros((y.len(), n_classes));
    for (i, &c) in y.iter().enumerate() {
        out[[i, c]] = 1.0;
    }
    out
}

/// Classifier entry point: validates one-hot targets, then fits.
pub fn train_multitask_lasso(
    x: ArrayView2<f64>,
    y_onehot: ArrayView2<f64>,
    params: &LassoParams,
) -> Result<MultitaskLassoFit> {
    check_one_hot(y_onehot)?;
    fit_multitask_lasso(x, y_onehot, params.alpha, params.tol, params.max_sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_negative_alpha_and_bad_targets() {
        let x = array![[1.0], [2.0]];
        let y = array![[1.0, 0.0], [0.0, 1.0]];
        assert!(fit_multitask_lasso(x.view(), y.view(), -0.1, 1e-6, 10).is_err());
        let bad = array![[1.0, 1.0], [0.0, 1.0]];
        assert!(train_multitask_lasso(x.view(), bad.view(), &LassoParams::default()).is_err());
        let half = array![[0.5, 0.5], [0.0, 1.0]];
        assert!(check_one_hot(half.view()).is_err());
    }

    #[test]
    fn above_critical_alpha_everything_is_zero() {
        let x = array![[1.0, 0.3], [2.0, -0.1], [3.0, 0.7], [4.0, 0.2]];
        let y = one_hot(&[0, 0, 1, 1], 2);
        let a = critical_alpha(x.view(), y.view());
        let fit = fit_multitask_lasso(x.view(), y.view(), a * 1.0001, 1e-10, 100).unwrap();
        assert!(fit.w.iter().all(|&v| v == 0.0));
        assert_eq!(fit.intercept, vec![0.5, 0.5]);
        let fit = fit_multitask_lasso(x.view(), y.view(), a * 0.5, 1e-10, 100).unwrap();
        assert!(fit.w.iter().any(|&v| v != 0.0));
    }
}
