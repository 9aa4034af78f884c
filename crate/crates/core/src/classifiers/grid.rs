//! Exhaustive grid search scored by mean stratified-fold accuracy.

use ndarray::{Axis, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{train, ModelSpec};
use crate::error::{Error, Result};
use crate::eval::{accuracy, stratified_kfold};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub spec: ModelSpec,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_index: usize,
    pub table: Vec<GridPoint>,
}

impl GridSearchResult {
    pub fn best(&self) -> &ModelSpec {
        &self.table[self.best_index].spec
    }
}

/// All points share one fold plan; the first point with the highest mean
/// wins.
pub fn grid_search(
    grid: &[ModelSpec],
    x: ArrayView2<f64>,
    y: &[u8],
    folds: usize,
    seed: u64,
    exec: Execution,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty grid"));
    }
    let plan = stratified_kfold(y, folds, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| (plan.train_indices(f), plan.test_indices(f)))
        .collect();
    let mut table = Vec::with_capacity(grid.len());
    for spec in grid {
        let mut accs = Vec::with_capacity(folds);
        for (tr, te) in &splits {
            let xtr = x.select(Axis(0), tr);
            let ytr: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
            let model = train(spec, xtr.view(), &ytr, exec)?;
            let pred = model.predict(x.select(Axis(0), te).view())?;
            let truth: Vec<u8> = te.iter().map(|&i| y[i]).collect();
            accs.push(accuracy(&pred, &truth)?);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        table.push(GridPoint {
            spec: spec.clone(),
            fold_accuracies: accs,
            mean_accuracy: mean,
        });
    }
    let mut best_index = 0;
    for (i, p) in table.iter().enumerate() {
        if p.mean_accuracy > table[best_index].mean_accuracy {
            best_index = i;
        }
    }
    Ok(GridSearchResult { best_index, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ModelFamily;
    use ndarray::Array2;

    #[test]
    fn single_and_duplicate_points() {
        let x = Array2::from_shape_fn((12, 1), |(i, _)| (i % 2) as f64);
        let y: Vec<u8> = (0..12).map(|i| 1 + (i % 2) as u8).collect();
        let spec = ModelFamily::LinearSvc.default_grid(0).swap_remove(0);
        let r = grid_search(&[spec.clone()], x.view(), &y, 3, 0, Execution::Sequential).unwrap();
        assert_eq!(r.best_index, 0);
        assert_eq!(r.table[0].fold_accuracies.len(), 3);
        let r = grid_search(&[spec.clone(), spec], x.view(), &y, 3, 0, Execution::Sequential).unwrap();
        assert_eq!(r.best_index, 0);
        assert_eq!(r.table[0].mean_accuracy, r.table[1].mean_accuracy);
        assert!(grid_search(&[], x.view(), &y, 3, 0, Execution::Sequential).is_err());
    }
}
