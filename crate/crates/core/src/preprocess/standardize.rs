use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureMatrix;

/// Fitted z-score parameters: z = (x - u) / s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerState {
    pub mean: Vec<f64>,
    /// Population standard deviations.
    pub std: Vec<f64>,
    /// Columns with zero variance on the fit rows; they are only centered.
    pub flagged: Vec<bool>,
}

impl StandardizerState {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn fit(x: ArrayView2<f64>) -> Result<Self> {
        let n = x.nrows();
        if n < 2 {
            return Err(Error::invalid("X", format!("standardization needs ≥ 2 rows (got {n})")));
        }
        let nf = n as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut std = Vec::with_capacity(x.ncols());
        for col in x.axis_iter(Axis(1)) {
            let mut u = col.sum() / nf;
            // second pass corrects rounding in the first
            u += col.iter().map(|v| v - u).sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - u).powi(2)).sum::<f64>() / nf;
            mean.push(u);
            std.push(var.sqrt());
        }
        let flagged = std.iter().map(|&s| s == 0.0).collect();
        Ok(StandardizerState { mean, std, flagged })
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.width() {
            return Err(Error::DimensionMismatch {
                context: "standardizer columns".into(),
                expected: self.width(),
                actual: x.ncols(),
            });
        }
        let mut out = x.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let s = if self.flagged[j] { 1.0 } else { self.std[j] };
            let u = self.mean[j];
            col.mapv_inplace(|v| (v - u) / s);
        }
        Ok(out)
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.width() {
            return Err(Error::DimensionMismatch {
                context: "standardizer columns".into(),
                expected: self.width(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let s = if self.flagged[j] { 1.0 } else { self.std[j] };
                (v - self.mean[j]) / s
            })
            .collect())
    }
}

pub fn standardize_fit(x: &FeatureMatrix) -> Result<StandardizerState> {
    StandardizerState::fit(x.values().view())
}

pub fn standardize_apply(state: &StandardizerState, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    Ok(x.with_values(state.transform(x.values().view())?))
}
