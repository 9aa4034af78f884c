//! Standardization, correlated-feature pruning, ANOVA p-values and the
//! univariate selection procedures.

mod select;
mod standardize;
mod stats;

pub use select::{
    correlation_matrix, correlation_prune, pearson, select_fdr_bh, select_fwe, select_k_best,
    SelectionMethod, SelectorParams, SelectorSpec, SelectorState, DEFAULT_CORRELATION_THRESHOLD,
};
pub use standardize::{standardize_apply, standardize_fit, StandardizerState};
pub use stats::{
    f_survival, f_test_pvalues, ln_gamma, one_way_anova, regularized_incomplete_beta, AnovaResult,
};
