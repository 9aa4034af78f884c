//! Cross-validation, metrics and the experiment matrix.

pub mod folds;
pub mod matrix;
pub mod metrics;
pub mod tables;

pub use folds::{group_kfold, stratified_kfold, FoldPlan};
pub use matrix::{
    fold_plan, run_experiment_matrix, Dataset, ExperimentConfig, ExperimentResult, FitEvent, MatrixObserver,
    NoMatrixObserver,
};
pub use metrics::{accuracy, confusion_matrix};
pub use tables::{config_hash, render_tables, results_csv, ResultTable, RunManifest};
