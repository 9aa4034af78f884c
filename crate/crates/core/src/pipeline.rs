//! Standardize → correlation prune → univariate select → grid search →
//! train, fitted on one training set and replayable on new rows.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::classifiers::{grid_search, train, GridSearchResult, ModelSpec, TrainedModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{ColumnDescriptor, FeatureMatrix};
use crate::preprocess::{correlation_prune, SelectorSpec, SelectorState, StandardizerState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub correlation_threshold: f64,
    /// Inner folds for hyperparameter search.
    pub inner_folds: usize,
    /// When false, the first grid point is trained directly.
    pub grid_search: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            correlation_threshold: crate::preprocess::DEFAULT_CORRELATION_THRESHOLD,
            inner_folds: 3,
            grid_search: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStage {
    Standardizer,
    Pruner,
    Selector,
    GridSearch,
    Model,
}

/// Receives the row ids of every matrix a fitting step reads.
pub trait FitObserver: Sync {
    fn fitted(&self, stage: FitStage, row_ids: &[String]);
}

pub struct NoObserver;

impl FitObserver for NoObserver {
    fn fitted(&self, _: FitStage, _: &[String]) {}
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    /// Canonical fused columns expected at input.
    pub input_columns: Vec<ColumnDescriptor>,
    pub standardizer: StandardizerState,
    pub pruner: SelectorState,
    pub selector: SelectorState,
    /// Model input columns, in order.
    pub selected_columns: Vec<String>,
    pub model: TrainedModel,
    pub grid: Option<GridSearchResult>,
}

pub fn fit_pipeline(
    x: &FeatureMatrix,
    y: &[u8],
    selector: &SelectorSpec,
    grid: &[ModelSpec],
    config: &PipelineConfig,
    exec: Execution,
    observer: &dyn FitObserver,
) -> Result<FittedPipeline> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty grid"));
    }
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "training rows vs labels".into(),
            expected: x.n_rows(),
            actual: y.len(),
        });
    }
    let ids = x.row_ids();
    observer.fitted(FitStage::Standardizer, ids);
    let standardizer = StandardizerState::fit(x.values().view())?;
    let z = standardizer.transform(x.values().view())?;

    observer.fitted(FitStage::Pruner, ids);
    let pruner = correlation_prune(z.view(), config.correlation_threshold)?;
    let z = z.select(Axis(1), &pruner.kept_columns);

    observer.fitted(FitStage::Selector, ids);
    let sel = selector.fit(z.view(), y)?;
    let z = z.select(Axis(1), &sel.kept_columns);
    let selected_columns = sel
        .kept_columns
        .iter()
        .map(|&j| x.columns()[pruner.kept_columns[j]].name.clone())
        .collect();

    let search = if config.grid_search && grid.len() > 1 && y.len() >= config.inner_folds {
        observer.fitted(FitStage::GridSearch, ids);
        Some(grid_search(grid, z.view(), y, config.inner_folds, grid[0].seed, exec)?)
    } else {
        None
    };
    let spec = search.as_ref().map_or(&grid[0], |g| g.best());
    observer.fitted(FitStage::Model, ids);
    let model = train(spec, z.view(), y, exec)?;

    Ok(FittedPipeline {
        input_columns: x.columns().to_vec(),
        standardizer,
        pruner,
        selector: sel,
        selected_columns,
        model,
        grid: search,
    })
}

impl FittedPipeline {
    fn check_columns(&self, x: &FeatureMatrix) -> Result<()> {
        if x.n_cols() != self.input_columns.len() {
            return Err(Error::DimensionMismatch {
                context: "feature width vs model bundle".into(),
                expected: self.input_columns.len(),
                actual: x.n_cols(),
            });
        }
        if let Some((got, want)) = x
            .columns()
            .iter()
            .zip(&self.input_columns)
            .find(|(a, b)| a.name != b.name)
        {
            return Err(Error::Data(format!(
                "feature column `{}` where the bundle expects `{}`",
                got.name, want.name
            )));
        }
        Ok(())
    }

    /// Standardized values of the selected columns.
    pub fn transform(&self, x: &FeatureMatrix) -> Result<Array2<f64>> {
        self.check_columns(x)?;
        let z = self.standardizer.transform(x.values().view())?;
        let z = z.select(Axis(1), &self.pruner.kept_columns);
        Ok(z.select(Axis(1), &self.selector.kept_columns))
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<u8>> {
        self.model.predict(self.transform(x)?.view())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ModelFamily;
    use crate::model::Modality;
    use std::sync::Mutex;

    struct Log(Mutex<Vec<(FitStage, Vec<String>)>>);
    impl FitObserver for Log {
        fn fitted(&self, stage: FitStage, ids: &[String]) {
            self.0.lock().unwrap().push((stage, ids.to_vec()));
        }
    }

    fn fixture() -> (FeatureMatrix, Vec<u8>) {
        let ids: Vec<String> = (0..12).map(|i| format!("r{i}")).collect();
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i % 2) as f64 * 4.0 + (i % 3) as f64 * 0.1, ((i * 5) % 7) as f64])
            .collect();
        let fm = FeatureMatrix::from_rows(Modality::Audio, &["a".into(), "b".into()], ids, &rows).unwrap();
        let y = (0..12).map(|i| 1 + (i % 2) as u8).collect();
        (fm, y)
    }

    #[test]
    fn fit_and_replay() {
        let (fm, y) = fixture();
        let log = Log(Mutex::new(Vec::new()));
        let grid = ModelFamily::LinearSvc.default_grid(0);
        let p = fit_pipeline(&fm, &y, &SelectorSpec::KBest { k: 1 }, &grid, &PipelineConfig::default(), Execution::Sequential, &log).unwrap();
        assert_eq!(p.selected_columns, vec!["a"]);
        assert_eq!(p.predict(&fm).unwrap(), y);
        let stages: Vec<FitStage> = log.0.lock().unwrap().iter().map(|e| e.0).collect();
        assert_eq!(stages, vec![FitStage::Standardizer, FitStage::Pruner, FitStage::Selector, FitStage::GridSearch, FitStage::Model]);
        let narrow = fm.take_columns(&[0]);
        assert!(matches!(p.predict(&narrow), Err(Error::DimensionMismatch { expected: 2, actual: 1, .. })));
    }
}
