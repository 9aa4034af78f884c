//! The four model families behind one train/predict contract. Classes are
//! the 1–7 label scores; internally each model works on indices into the
//! sorted list of classes observed at training time.

pub mod forest;
pub mod grid;
pub mod lasso;
pub mod mlp;
pub mod svc;

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

pub use forest::{Forest, ForestParams, SplitCriterion};
pub use grid::{grid_search, GridPoint, GridSearchResult};
pub use lasso::{fit_multitask_lasso, LassoParams, MultitaskLassoFit};
pub use mlp::{Mlp, MlpParams};
pub use svc::{LinearSvc, SvcParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    RandomForest,
    LinearSvc,
    MultitaskLasso,
    Mlp,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 4] = [
        ModelFamily::RandomForest,
        ModelFamily::LinearSvc,
        ModelFamily::MultitaskLasso,
        ModelFamily::Mlp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::RandomForest => "random_forest",
            ModelFamily::LinearSvc => "linear_svc",
            ModelFamily::MultitaskLasso => "multitask_lasso",
            ModelFamily::Mlp => "mlp",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ModelFamily::RandomForest => "rf",
            ModelFamily::LinearSvc => "svc",
            ModelFamily::MultitaskLasso => "lasso",
            ModelFamily::Mlp => "mlp",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ModelFamily::RandomForest => "Random Forest",
            ModelFamily::LinearSvc => "SVC",
            ModelFamily::MultitaskLasso => "Multitask Lasso",
            ModelFamily::Mlp => "MLP",
        }
    }

    /// Default hyperparameter grid in search order.
    pub fn default_grid(self, seed: u64) -> Vec<ModelSpec> {
        let points: Vec<Hyperparams> = match self {
            ModelFamily::RandomForest => [50, 100, 200]
                .iter()
                .flat_map(|&n_trees| {
                    [SplitCriterion::Gini, SplitCriterion::InfoGain, SplitCriterion::GainRatio]
                        .map(|criterion| {
                            Hyperparams::RandomForest(ForestParams {
                                n_trees,
                                criterion,
                                ..ForestParams::default()
                            })
                        })
                })
                .collect(),
            ModelFamily::LinearSvc => [1e-3, 1e-2, 1e-1]
                .map(|lambda| {
                    Hyperparams::LinearSvc(SvcParams {
                        lambda,
                        epochs: 200,
                        ..SvcParams::default()
                    })
                })
                .to_vec(),
            ModelFamily::MultitaskLasso => [0.01, 0.05, 0.1, 0.5]
                .map(|alpha| {
                    Hyperparams::MultitaskLasso(LassoParams {
                        alpha,
                        ..LassoParams::default()
                    })
                })
                .to_vec(),
            ModelFamily::Mlp => [16, 64]
                .iter()
                .flat_map(|&h| {
                    [0.01, 0.001].map(|learning_rate| {
                        Hyperparams::Mlp(MlpParams {
                            hidden: vec![h],
                            learning_rate,
                            epochs: 500,
                        })
                    })
                })
                .collect(),
        };
        points
            .into_iter()
            .map(|hyperparams| ModelSpec { hyperparams, seed })
            .collect()
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        ModelFamily::ALL
            .into_iter()
            .find(|m| m.short_name() == lower || m.as_str() == lower)
            .ok_or_else(|| {
                Error::invalid("model", format!("unknown model family {s:?} (expected rf, svc, lasso or mlp)"))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Hyperparams {
    RandomForest(ForestParams),
    LinearSvc(SvcParams),
    MultitaskLasso(LassoParams),
    Mlp(MlpParams),
}

impl Hyperparams {
    pub fn family(&self) -> ModelFamily {
        match self {
            Hyperparams::RandomForest(_) => ModelFamily::RandomForest,
            Hyperparams::LinearSvc(_) => ModelFamily::LinearSvc,
            Hyperparams::MultitaskLasso(_) => ModelFamily::MultitaskLasso,
            Hyperparams::Mlp(_) => ModelFamily::Mlp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hyperparams::RandomForest(p) => {
                if p.n_trees < 1 {
                    return Err(Error::invalid("n_trees", "must be ≥ 1"));
                }
                if p.min_samples_leaf < 1 {
                    return Err(Error::invalid("min_samples_leaf", "must be ≥ 1"));
                }
                if p.max_features == Some(0) {
                    return Err(Error::invalid("max_features", "must be ≥ 1"));
                }
            }
            Hyperparams::LinearSvc(p) => {
                if !(p.lambda > 0.0) {
                    return Err(Error::invalid("lambda", "must be > 0"));
                }
                if !(p.eta0 > 0.0) {
                    return Err(Error::invalid("eta0", "must be > 0"));
                }
            }
            Hyperparams::MultitaskLasso(p) => {
                if !(p.alpha >= 0.0) {
                    return Err(Error::invalid("alpha", "must be ≥ 0"));
                }
                if !(p.tol > 0.0) {
                    return Err(Error::invalid("tol", "must be > 0"));
                }
            }
            Hyperparams::Mlp(p) => {
                if !(p.learning_rate > 0.0) {
                    return Err(Error::invalid("learning_rate", "must be > 0"));
                }
                if p.hidden.is_empty() || p.hidden.len() > 2 || p.hidden.contains(&0) {
                    return Err(Error::invalid("hidden", "one or two non-zero layer sizes"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub hyperparams: Hyperparams,
    pub seed: u64,
}

impl ModelSpec {
    pub fn family(&self) -> ModelFamily {
        self.hyperparams.family()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fit", rename_all = "snake_case")]
pub enum FittedParams {
    RandomForest(Forest),
    LinearSvc(LinearSvc),
    MultitaskLasso(MultitaskLassoFit),
    Mlp(Mlp),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub family: ModelFamily,
    pub spec: ModelSpec,
    /// Sorted classes seen in training.
    pub class_universe: Vec<u8>,
    pub feature_width: usize,
    pub params: FittedParams,
}

fn encode_classes(y: &[u8]) -> Result<(Vec<u8>, Vec<usize>)> {
    if let Some(&bad) = y.iter().find(|c| !(1..=7).contains(*c)) {
        return Err(Error::Data(format!("class {bad} outside 1..=7")));
    }
    let mut universe = y.to_vec();
    universe.sort_unstable();
    universe.dedup();
    let idx = y
        .iter()
        .map(|c| universe.binary_search(c).unwrap())
        .collect();
    Ok((universe, idx))
}

/// Trains one model. Deterministic in (x, y, spec); `exec` only affects
/// scheduling of forest trees.
pub fn train(spec: &ModelSpec, x: ArrayView2<f64>, y: &[u8], exec: Execution) -> Result<TrainedModel> {
    spec.hyperparams.validate()?;
    if x.nrows() == 0 {
        return Err(Error::Data("empty training set".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "training rows vs labels".into(),
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    let (class_universe, idx) = encode_classes(y)?;
    let c = class_universe.len();
    let params = match &spec.hyperparams {
        Hyperparams::RandomForest(p) => FittedParams::RandomForest(Forest::fit(x, &idx, c, p, spec.seed, exec)),
        Hyperparams::LinearSvc(p) => FittedParams::LinearSvc(LinearSvc::fit(x, &idx, c, p, spec.seed)),
        Hyperparams::MultitaskLasso(p) => {
            let y1 = lasso::one_hot(&idx, c);
            FittedParams::MultitaskLasso(lasso::train_multitask_lasso(x, y1.view(), p)?)
        }
        Hyperparams::Mlp(p) => FittedParams::Mlp(Mlp::fit(x, &idx, c, p, spec.seed)?),
    };
    Ok(TrainedModel {
        family: spec.family(),
        spec: spec.clone(),
        class_universe,
        feature_width: x.ncols(),
        params,
    })
}

fn argmax_first(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best.0
}

impl TrainedModel {
    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.feature_width {
            return Err(Error::DimensionMismatch {
                context: "model feature width".into(),
                expected: self.feature_width,
                actual: width,
            });
        }
        Ok(())
    }

    fn predict_index(&self, row: ArrayView1<f64>) -> usize {
        if self.class_universe.len() == 1 {
            return 0;
        }
        match &self.params {
            FittedParams::RandomForest(f) => match row.as_slice() {
                Some(s) => f.predict_row(s),
                None => f.predict_row(&row.to_vec()),
            },
            FittedParams::LinearSvc(m) => m.predict_row(row),
            FittedParams::MultitaskLasso(fit) => {
                let scores = fit.w.t().dot(&row);
                argmax_first(scores.iter().zip(&fit.intercept).map(|(s, b)| s + b))
            }
            FittedParams::Mlp(m) => m.predict_row(row),
        }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> Result<u8> {
        self.check_width(row.len())?;
        Ok(self.class_universe[self.predict_index(row)])
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<u8>> {
        self.check_width(x.ncols())?;
        Ok(x.rows()
            .into_iter()
            .map(|r| self.class_universe[self.predict_index(r)])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn blobs() -> (Array2<f64>, Vec<u8>) {
        let x = Array2::from_shape_fn((30, 2), |(i, j)| {
            let c = i % 3;
            let centre = if c == j + 1 { 3.0 } else { 0.0 };
            centre + ((i * 7 + j * 3) % 5) as f64 * 0.1
        });
        let y = (0..30).map(|i| [2u8, 5, 7][i % 3]).collect();
        (x, y)
    }

    #[test]
    fn every_family_learns_blobs() {
        let (x, y) = blobs();
        for fam in ModelFamily::ALL {
            let spec = fam.default_grid(1).swap_remove(0);
            let spec = match spec.hyperparams {
                Hyperparams::Mlp(mut p) => {
                    p.learning_rate = 0.1;
                    ModelSpec { hyperparams: Hyperparams::Mlp(p), seed: 1 }
                }
                _ => spec,
            };
            let m = train(&spec, x.view(), &y, Execution::Sequential).unwrap();
            assert_eq!(m.class_universe, vec![2, 5, 7]);
            let pred = m.predict(x.view()).unwrap();
            let acc = pred.iter().zip(&y).filter(|(a, b)| a == b).count() as f64 / 30.0;
            assert!(acc >= 0.9, "{fam}: {acc}");
            assert!(pred.iter().all(|p| m.class_universe.contains(p)));
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let (x, y) = blobs();
        let spec = ModelFamily::LinearSvc.default_grid(0).swap_remove(0);
        let m = train(&spec, x.view(), &y, Execution::Sequential).unwrap();
        let narrow = Array2::<f64>::zeros((1, 1));
        let err = m.predict(narrow.view()).unwrap_err().to_string();
        assert!(err.contains('2') && err.contains('1'), "{err}");
    }

    #[test]
    fn single_class_is_constant() {
        let x = Array2::from_shape_fn((5, 2), |(i, j)| (i + j) as f64);
        for fam in ModelFamily::ALL {
            let spec = fam.default_grid(0).swap_remove(0);
            let m = train(&spec, x.view(), &[4; 5], Execution::Sequential).unwrap();
            assert_eq!(m.predict(x.view()).unwrap(), vec![4; 5]);
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        for fam in ModelFamily::ALL {
            for spec in fam.default_grid(3) {
                let s = serde_json::to_string(&spec).unwrap();
                let back: ModelSpec = serde_json::from_str(&s).unwrap();
                assert_eq!(back, spec);
            }
        }
        assert_eq!(ModelFamily::ALL.iter().map(|f| f.default_grid(0).len()).collect::<Vec<_>>(), vec![9, 3, 4, 4]);
        assert_eq!("lasso".parse::<ModelFamily>().unwrap(), ModelFamily::MultitaskLasso);
        assert!("knn".parse::<ModelFamily>().is_err());
    }
}
