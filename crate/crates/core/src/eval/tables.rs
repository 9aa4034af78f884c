//! Result tables in the layout of the four published tables, the flat
//! per-cell results CSV and the run manifest.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::matrix::{ExperimentConfig, ExperimentResult};
use crate::classifiers::ModelFamily;
use crate::error::Result;
use crate::model::{LabelName, Modality, ModalityMask};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub name: String,
    pub caption: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl ResultTable {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.columns.len())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("Label");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, vals) in &self.rows {
            out.push_str(label);
            for v in vals {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&format!("{v:.4}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn best(results: &[ExperimentResult], pred: impl Fn(&ExperimentResult) -> bool) -> Option<f64> {
    results
        .iter()
        .filter(|r| pred(r))
        .map(|r| r.mean_accuracy)
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

fn table(
    name: &str,
    caption: &str,
    results: &[ExperimentResult],
    columns: Vec<String>,
    cell: impl Fn(&ExperimentResult, LabelName, usize) -> bool,
) -> ResultTable {
    let rows = LabelName::ALL
        .iter()
        .map(|&l| {
            let vals = (0..columns.len())
                .map(|c| best(results, |r| r.label_name == l && cell(r, l, c)))
                .collect();
            (l.title().to_string(), vals)
        })
        .collect();
    ResultTable {
        name: name.into(),
        caption: caption.into(),
        columns,
        rows,
    }
}

fn mask(ms: &[Modality]) -> ModalityMask {
    ModalityMask::new(ms).expect("non-empty")
}

/// Tables 1 to 4. Each entry is the best mean fold accuracy among the
/// cells matching that row and column; cells that were not run are empty.
pub fn render_tables(results: &[ExperimentResult]) -> Vec<ResultTable> {
    use Modality::*;
    let full = ModalityMask::ALL;
    let rf = ModelFamily::RandomForest;

    let t1 = table(
        "table1_best_per_model",
        "Best accuracy per model on the audio+video+lexical feature vector",
        results,
        ModelFamily::ALL.iter().map(|f| f.title().to_string()).collect(),
        |r, _, c| r.modality_mask == full && r.model_family == ModelFamily::ALL[c],
    );

    let combos = [full, mask(&[Audio, Video]), mask(&[Video, Lexical]), mask(&[Audio, Lexical])];
    let t2 = table(
        "table2_modality_combinations_rf",
        "Accuracy for combinations of modalities using Random Forest",
        results,
        vec![
            "Audio+Video+Lexical".into(),
            "Audio+Video".into(),
            "Lexical+Video".into(),
            "Audio+Lexical".into(),
        ],
        |r, _, c| r.model_family == rf && r.modality_mask == combos[c],
    );

    let singles = [Audio, Video, Lexical].map(ModalityMask::single);
    let t3 = table(
        "table3_single_modalities_rf",
        "Accuracy for individual modalities using Random Forest",
        results,
        vec!["Audio".into(), "Video".into(), "Lexical".into()],
        |r, _, c| r.model_family == rf && r.modality_mask == singles[c],
    );

    let selectors = ["bh", "fwe", "kbest"];
    let t4 = table(
        "table4_selectors",
        "Best accuracy per feature selection technique on all modalities",
        results,
        vec![
            "Benjamini-Hochberg".into(),
            "Family-wise error selection".into(),
            "K best feature selection".into(),
        ],
        |r, _, c| r.modality_mask == full && r.selector.short_name() == selectors[c],
    );
    vec![t1, t2, t3, t4]
}

/// One row per cell with fold accuracies joined by `;`.
pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("label,modalities,selector,model,mean_accuracy,fold_accuracies,n_selected\n");
    for r in results {
        let folds: Vec<String> = r.fold_accuracies.iter().map(|a| format!("{a:.6}")).collect();
        out.push_str(&format!(
            "{},{},{},{},{:.6},{},{}\n",
            r.label_name.as_str(),
            r.modality_mask,
            r.selector.short_name(),
            r.model_family.short_name(),
            r.mean_accuracy,
            folds.join(";"),
            r.selected_feature_names.len()
        ));
    }
    out
}

/// Hex sha256 of the canonical JSON encoding.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| crate::Error::Data(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub n_rows: usize,
    pub config: &'a ExperimentConfig,
    pub results: &'a [ExperimentResult],
}

impl<'a> RunManifest<'a> {
    pub fn new(config: &'a ExperimentConfig, n_rows: usize, results: &'a [ExperimentResult]) -> Result<Self> {
        Ok(RunManifest {
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(config)?,
            seed: config.seed,
            n_rows,
            config,
            results,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Data(e.to_string()))
    }
}
