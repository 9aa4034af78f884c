//! Correlation pruning and univariate selectors (k-best, Benjamini-Hochberg,
//! Bonferroni family-wise error).

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureMatrix;

use super::stats::f_test_pvalues;

pub const DEFAULT_CORRELATION_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    KBest,
    FdrBh,
    Fwe,
    CorrelationPrune,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorParams {
    K(usize),
    Q(f64),
    Alpha(f64),
    Threshold(f64),
}

/// Result of fitting a selection step: which input columns survive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorState {
    pub method: SelectionMethod,
    /// Kept input column indices, ascending.
    pub kept_columns: Vec<usize>,
    pub pvalues: Option<Vec<f64>>,
    pub params: SelectorParams,
    /// Input width the state was fit on.
    pub input_width: usize,
}

impl SelectorState {
    pub fn apply(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.n_cols() != self.input_width {
            return Err(Error::DimensionMismatch {
                context: "selector input columns".into(),
                expected: self.input_width,
                actual: x.n_cols(),
            });
        }
        Ok(x.take_columns(&self.kept_columns))
    }

    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.input_width {
            return Err(Error::DimensionMismatch {
                context: "selector input columns".into(),
                expected: self.input_width,
                actual: row.len(),
            });
        }
        Ok(self.kept_columns.iter().map(|&j| row[j]).collect())
    }
}

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let n = a.len() as f64;
    let ma = a.sum() / n;
    let mb = b.sum() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Left-to-right scan: a column is dropped when its |r| with any already
/// kept column exceeds `threshold`.
pub fn correlation_prune(x: ArrayView2<f64>, threshold: f64) -> Result<SelectorState> {
    if x.nrows() < 3 {
        return Err(Error::invalid("X", format!("correlation pruning needs ≥ 3 rows (got {})", x.nrows())));
    }
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j);
        if kept.iter().all(|&i| pearson(x.column(i), col).abs() <= threshold) {
            kept.push(j);
        }
    }
    Ok(SelectorState {
        method: SelectionMethod::CorrelationPrune,
        kept_columns: kept,
        pvalues: None,
        params: SelectorParams::Threshold(threshold),
        input_width: x.ncols(),
    })
}

/// Column order by ascending p-value, ties by lower index.
fn rank_by_pvalue(p: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    idx
}

fn state(method: SelectionMethod, mut kept: Vec<usize>, p: &[f64], params: SelectorParams) -> SelectorState {
    kept.sort_unstable();
    SelectorState {
        method,
        kept_columns: kept,
        pvalues: Some(p.to_vec()),
        params,
        input_width: p.len(),
    }
}

fn check_pvalues(p: &[f64]) -> Result<()> {
    match p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(v) => Err(Error::invalid("pvalues", format!("{v} outside [0, 1]"))),
        None => Ok(()),
    }
}

pub fn select_k_best(p: &[f64], k: usize) -> Result<SelectorState> {
    check_pvalues(p)?;
    if k == 0 || k > p.len() {
        return Err(Error::invalid("k", format!("{k} outside [1, {}]", p.len())));
    }
    let kept = rank_by_pvalue(p).into_iter().take(k).collect();
    Ok(state(SelectionMethod::KBest, kept, p, SelectorParams::K(k)))
}

/// Benjamini-Hochberg: keep the r smallest p-values, r the largest rank
/// with p_(r) ≤ r·Q/m.
pub fn select_fdr_bh(p: &[f64], q: f64) -> Result<SelectorState> {
    check_pvalues(p)?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::invalid("Q", format!("{q} outside (0, 1]")));
    }
    let m = p.len() as f64;
    let order = rank_by_pvalue(p);
    let cutoff = order
        .iter()
        .enumerate()
        .rposition(|(r, &j)| p[j] <= (r + 1) as f64 * q / m)
        .map_or(0, |r| r + 1);
    let kept = order[..cutoff].to_vec();
    Ok(state(SelectionMethod::FdrBh, kept, p, SelectorParams::Q(q)))
}

/// Bonferroni: keep p ≤ alpha/m.
pub fn select_fwe(p: &[f64], alpha: f64) -> Result<SelectorState> {
    check_pvalues(p)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} outside (0, 1]")));
    }
    let cutoff = alpha / p.len() as f64;
    let kept = (0..p.len()).filter(|&j| p[j] <= cutoff).collect();
    Ok(state(SelectionMethod::Fwe, kept, p, SelectorParams::Alpha(alpha)))
}

/// Configured univariate selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SelectorSpec {
    #[serde(rename = "kbest")]
    KBest { k: usize },
    #[serde(rename = "bh")]
    FdrBh { q: f64 },
    #[serde(rename = "fwe")]
    Fwe { alpha: f64 },
}

impl SelectorSpec {
    pub const DEFAULTS: [SelectorSpec; 3] = [
        SelectorSpec::FdrBh { q: 0.05 },
        SelectorSpec::Fwe { alpha: 0.05 },
        SelectorSpec::KBest { k: 10 },
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            SelectorSpec::KBest { .. } => "kbest",
            SelectorSpec::FdrBh { .. } => "bh",
            SelectorSpec::Fwe { .. } => "fwe",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            SelectorSpec::KBest { .. } => "K best feature selection",
            SelectorSpec::FdrBh { .. } => "Benjamini-Hochberg",
            SelectorSpec::Fwe { .. } => "Family-wise error selection",
        }
    }

    /// Computes ANOVA p-values on `x` and applies the selector. `k` is
    /// clamped to the column count. When the procedure keeps nothing the
    /// single smallest-p column is kept so downstream models have input.
    pub fn fit(&self, x: ArrayView2<f64>, y: &[u8]) -> Result<SelectorState> {
        let d = x.ncols();
        if d == 0 {
            return Err(Error::Data("no columns left to select from".into()));
        }
        let p = if y.iter().all(|&c| c == y[0]) {
            // a single training class carries no association signal
            vec![1.0; d]
        } else {
            f_test_pvalues(x, y)?
        };
        let mut st = match *self {
            SelectorSpec::KBest { k } => select_k_best(&p, k.clamp(1, d))?,
            SelectorSpec::FdrBh { q } => select_fdr_bh(&p, q)?,
            SelectorSpec::Fwe { alpha } => select_fwe(&p, alpha)?,
        };
        if st.kept_columns.is_empty() {
            st.kept_columns = vec![rank_by_pvalue(&p)[0]];
        }
        Ok(st)
    }
}

impl fmt::Display for SelectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SelectorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kbest" | "k_best" => Ok(SelectorSpec::KBest { k: 10 }),
            "bh" | "fdr" | "fdr_bh" => Ok(SelectorSpec::FdrBh { q: 0.05 }),
            "fwe" | "bonferroni" => Ok(SelectorSpec::Fwe { alpha: 0.05 }),
            _ => Err(Error::invalid("selector", format!("unknown selector `{s}` (kbest|bh|fwe)"))),
        }
    }
}

/// Full pairwise Pearson matrix.
pub fn correlation_matrix(x: ArrayView2<f64>) -> Vec<Vec<f64>> {
    let cols: Vec<_> = x.axis_iter(Axis(1)).collect();
    cols.iter()
        .map(|a| cols.iter().map(|b| pearson(a.view(), b.view())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn k_best_cases() {
        assert_eq!(select_k_best(&[0.3, 0.2, 0.1], 3).unwrap().kept_columns, vec![0, 1, 2]);
        assert_eq!(select_k_best(&[0.9, 0.1, 0.5], 1).unwrap().kept_columns, vec![1]);
        assert_eq!(select_k_best(&[0.2, 0.2, 0.9], 1).unwrap().kept_columns, vec![0]);
        assert!(select_k_best(&[0.2], 0).is_err());
        assert!(select_k_best(&[0.2], 2).is_err());
    }

    #[test]
    fn bh_cases() {
        assert!(select_fdr_bh(&[1.0; 4], 0.05).unwrap().kept_columns.is_empty());
        let all = select_fdr_bh(&[0.01, 0.02, 0.03, 0.04, 0.05], 0.05).unwrap();
        assert_eq!(all.kept_columns, vec![0, 1, 2, 3, 4]);
        let one = select_fdr_bh(&[0.001, 0.30, 0.40], 0.05).unwrap();
        assert_eq!(one.kept_columns, vec![0]);
        // step-up: a late pass rescues an earlier failure
        let up = select_fdr_bh(&[0.04, 0.041, 0.001], 0.0625).unwrap();
        assert_eq!(up.kept_columns, vec![0, 1, 2]);
        assert!(select_fdr_bh(&[0.1], 0.0).is_err());
    }

    #[test]
    fn fwe_cases() {
        assert!(select_fwe(&[1.0, 1.0], 0.05).unwrap().kept_columns.is_empty());
        assert_eq!(select_fwe(&[0.001, 0.04], 0.05).unwrap().kept_columns, vec![0]);
        assert_eq!(select_fwe(&[0.5, 0.2], 1.0).unwrap().kept_columns, vec![0, 1]);
    }

    #[test]
    fn duplicate_columns_pruned() {
        let x = array![[1.0, 1.0], [2.0, 2.0], [4.0, 4.0], [3.0, 3.0]];
        assert_eq!(correlation_prune(x.view(), 0.6).unwrap().kept_columns, vec![0]);
    }

    #[test]
    fn exact_threshold_is_kept_and_constant_columns_survive() {
        let x = array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]];
        assert_eq!(correlation_prune(x.view(), 0.6).unwrap().kept_columns, vec![0, 1]);
        let x = Array2::from_shape_fn((3, 2), |(i, j)| (i * (j + 1)) as f64);
        assert_eq!(correlation_prune(x.view(), 1.0).unwrap().kept_columns, vec![0, 1]);
        assert!(correlation_prune(array![[1.0], [2.0]].view(), 0.6).is_err());
    }

    #[test]
    fn parse_selector() {
        assert_eq!("bh".parse::<SelectorSpec>().unwrap().short_name(), "bh");
        assert!("lasso".parse::<SelectorSpec>().is_err());
        let json = serde_json::to_string(&SelectorSpec::KBest { k: 4 }).unwrap();
        assert_eq!(json, r#"{"method":"kbest","k":4}"#);
    }

    #[test]
    fn empty_selection_falls_back_to_best_column() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [0.0, 0.0], [1.0, 1.0]];
        let st = SelectorSpec::Fwe { alpha: 1e-9 }.fit(x.view(), &[1, 1, 2, 2]).unwrap();
        assert_eq!(st.kept_columns.len(), 1);
    }
}
