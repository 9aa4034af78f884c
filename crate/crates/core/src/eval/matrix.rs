//! The experiment matrix: every (label × modality mask × selector × model
//! family) cell evaluated by k-fold cross-validation with all fitting done
//! on the training fold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::folds::{group_kfold, stratified_kfold, FoldPlan};
use super::metrics::accuracy;
use crate::classifiers::{Hyperparams, ModelFamily, ModelSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{fuse_features, FeatureMatrix, InterviewRecord, LabelName, ModalityMask};
use crate::pipeline::{fit_pipeline, FitObserver, FitStage, PipelineConfig};
use crate::preprocess::SelectorSpec;

/// Per-modality feature parts plus aligned labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub parts: Vec<FeatureMatrix>,
    pub labels: BTreeMap<LabelName, Vec<u8>>,
    /// Candidate id per row, for grouped folds.
    pub groups: Vec<Option<String>>,
}

impl Dataset {
    /// Pairs feature parts with manifest labels by row id.
    pub fn from_records(parts: Vec<FeatureMatrix>, records: &[InterviewRecord]) -> Result<Dataset> {
        let Some(first) = parts.first() else {
            return Err(Error::Data("dataset needs at least one feature part".into()));
        };
        let rows = first.row_ids().to_vec();
        if parts.iter().any(|p| p.row_ids() != rows.as_slice()) {
            return Err(Error::RowIdMismatch("feature parts disagree on row ids".into()));
        }
        let by_id: BTreeMap<&str, &InterviewRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
        let recs = rows
            .iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| Error::Data(format!("no manifest record for feature row `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = LabelName::ALL
            .iter()
            .map(|&l| (l, recs.iter().map(|r| r.label(l)).collect()))
            .collect();
        let groups = recs.iter().map(|r| r.candidate.clone()).collect();
        Ok(Dataset { parts, labels, groups })
    }

    pub fn n_rows(&self) -> usize {
        self.parts.first().map_or(0, |p| p.n_rows())
    }

    pub fn row_ids(&self) -> &[String] {
        self.parts.first().map_or(&[], |p| p.row_ids())
    }

    pub fn fused(&self, mask: ModalityMask) -> Result<FeatureMatrix> {
        fuse_features(&self.parts, mask)
    }

    pub fn label(&self, name: LabelName) -> Result<&[u8]> {
        self.labels
            .get(&name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Data(format!("dataset has no labels for {name}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub labels: Vec<LabelName>,
    pub modalities: Vec<ModalityMask>,
    pub selectors: Vec<SelectorSpec>,
    pub models: Vec<ModelFamily>,
    pub folds: usize,
    pub group_by_candidate: bool,
    pub seed: u64,
    pub pipeline: PipelineConfig,
    /// Per-family grid overrides; families not listed use their default grid.
    pub grids: BTreeMap<ModelFamily, Vec<Hyperparams>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            labels: LabelName::ALL.to_vec(),
            modalities: ModalityMask::all_combinations(),
            selectors: SelectorSpec::DEFAULTS.to_vec(),
            models: ModelFamily::ALL.to_vec(),
            folds: 3,
            group_by_candidate: false,
            seed: 42,
            pipeline: PipelineConfig::default(),
            grids: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn grid_for(&self, family: ModelFamily) -> Result<Vec<ModelSpec>> {
        match self.grids.get(&family) {
            None => Ok(family.default_grid(self.seed)),
            Some(points) => {
                if points.is_empty() {
                    return Err(Error::invalid("grids", format!("empty grid for {family}")));
                }
                points
                    .iter()
                    .map(|h| {
                        if h.family() != family {
                            return Err(Error::invalid(
                                "grids",
                                format!("{} point listed under {family}", h.family()),
                            ));
                        }
                        h.validate()?;
                        Ok(ModelSpec { hyperparams: h.clone(), seed: self.seed })
                    })
                    .collect()
            }
        }
    }

    pub fn n_cells(&self) -> usize {
        self.labels.len() * self.modalities.len() * self.selectors.len() * self.models.len()
    }

    fn validate(&self) -> Result<()> {
        if self.labels.is_empty() || self.modalities.is_empty() || self.selectors.is_empty() || self.models.is_empty() {
            return Err(Error::invalid("config", "labels, modalities, selectors and models must be non-empty"));
        }
        if self.folds < 2 {
            return Err(Error::invalid("folds", format!("need at least 2 (got {})", self.folds)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub label_name: LabelName,
    pub modality_mask: ModalityMask,
    pub selector: SelectorSpec,
    pub model_family: ModelFamily,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Columns chosen in at least one fold, in fused column order.
    pub selected_feature_names: Vec<String>,
    /// Hyperparameters picked in each fold.
    pub fold_specs: Vec<ModelSpec>,
}

/// Context handed to a [`MatrixObserver`] with every fitting event.
#[derive(Debug, Clone, Copy)]
pub struct FitEvent<'a> {
    pub label: LabelName,
    pub mask: ModalityMask,
    pub selector: &'a SelectorSpec,
    pub family: ModelFamily,
    pub fold: usize,
    pub stage: FitStage,
    pub row_ids: &'a [String],
}

pub trait MatrixObserver: Sync {
    fn fitted(&self, event: FitEvent<'_>);
}

pub struct NoMatrixObserver;

impl MatrixObserver for NoMatrixObserver {
    fn fitted(&self, _: FitEvent<'_>) {}
}

struct CellObserver<'a> {
    inner: &'a dyn MatrixObserver,
    label: LabelName,
    mask: ModalityMask,
    selector: &'a SelectorSpec,
    family: ModelFamily,
    fold: usize,
}

impl FitObserver for CellObserver<'_> {
    fn fitted(&self, stage: FitStage, row_ids: &[String]) {
        self.inner.fitted(FitEvent {
            label: self.label,
            mask: self.mask,
            selector: self.selector,
            family: self.family,
            fold: self.fold,
            stage,
            row_ids,
        });
    }
}

/// Fold plan used for `label`; shared by all cells of that label.
pub fn fold_plan(dataset: &Dataset, config: &ExperimentConfig, label: LabelName) -> Result<FoldPlan> {
    if config.group_by_candidate {
        group_kfold(&dataset.groups, config.folds, config.seed)
    } else {
        stratified_kfold(dataset.label(label)?, config.folds, config.seed)
    }
}

struct Cell {
    label: LabelName,
    mask_index: usize,
    selector_index: usize,
    family: ModelFamily,
}

/// Runs every configured cell. Results come back in (label, mask, selector,
/// model) order of the configuration lists regardless of scheduling.
pub fn run_experiment_matrix(
    dataset: &Dataset,
    config: &ExperimentConfig,
    exec: Execution,
    observer: &dyn MatrixObserver,
) -> Result<Vec<ExperimentResult>> {
    config.validate()?;
    let fused = config
        .modalities
        .iter()
        .map(|&m| dataset.fused(m))
        .collect::<Result<Vec<_>>>()?;
    let mut plans = BTreeMap::new();
    for &l in &config.labels {
        plans.insert(l, fold_plan(dataset, config, l)?);
    }
    let mut grids = BTreeMap::new();
    for &f in &config.models {
        grids.insert(f, config.grid_for(f)?);
    }

    let mut cells = Vec::with_capacity(config.n_cells());
    for &label in &config.labels {
        for mask_index in 0..config.modalities.len() {
            for selector_index in 0..config.selectors.len() {
                for &family in &config.models {
                    cells.push(Cell { label, mask_index, selector_index, family });
                }
            }
        }
    }

    exec.try_map(&cells, |cell| {
        let x = &fused[cell.mask_index];
        let y = dataset.label(cell.label)?;
        let plan = &plans[&cell.label];
        let selector = &config.selectors[cell.selector_index];
        let mut accs = Vec::with_capacity(plan.k);
        let mut specs = Vec::with_capacity(plan.k);
        let mut chosen = vec![false; x.n_cols()];
        for fold in 0..plan.k {
            let tr = plan.train_indices(fold);
            let te = plan.test_indices(fold);
            let xtr = x.take_rows(&tr);
            let ytr: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
            let obs = CellObserver {
                inner: observer,
                label: cell.label,
                mask: config.modalities[cell.mask_index],
                selector,
                family: cell.family,
                fold,
            };
            // inner tasks stay sequential; the cells already fill the pool
            let fitted = fit_pipeline(
                &xtr,
                &ytr,
                selector,
                &grids[&cell.family],
                &config.pipeline,
                Execution::Sequential,
                &obs,
            )?;
            let pred = fitted.predict(&x.take_rows(&te))?;
            let truth: Vec<u8> = te.iter().map(|&i| y[i]).collect();
            accs.push(accuracy(&pred, &truth)?);
            for (j, c) in x.columns().iter().enumerate() {
                if fitted.selected_columns.contains(&c.name) {
                    chosen[j] = true;
                }
            }
            specs.push(fitted.model.spec.clone());
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        Ok(ExperimentResult {
            label_name: cell.label,
            modality_mask: config.modalities[cell.mask_index],
            selector: *selector,
            model_family: cell.family,
            fold_accuracies: accs,
            mean_accuracy: mean,
            selected_feature_names: x
                .columns()
                .iter()
                .zip(&chosen)
                .filter(|(_, &c)| c)
                .map(|(c, _)| c.name.clone())
                .collect(),
            fold_specs: specs,
        })
    })
}
