//! Self-contained per-label model bundles.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::ExtractedFeatures;
use crate::model::{fuse_features, LabelName, ModalityMask};
use crate::pipeline::FittedPipeline;
use crate::preprocess::SelectorSpec;
use crate::report::{FeatureValue, LabelPrediction, Predictions};

pub const BUNDLE_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: u32,
    pub label: LabelName,
    pub modalities: ModalityMask,
    pub selector: SelectorSpec,
    pub training_rows: usize,
    pub pipeline: FittedPipeline,
}

impl ModelBundle {
    pub fn file_name(label: LabelName) -> String {
        format!("{}.model.json", label.as_str())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Data(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<ModelBundle> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let b: ModelBundle = serde_json::from_str(&text).map_err(|e| Error::Parse {
            context: format!("{}:{}:{}", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })?;
        if b.format != BUNDLE_FORMAT {
            return Err(Error::Data(format!("unsupported bundle format {}", b.format)));
        }
        Ok(b)
    }

    /// Predicts the record at `row` and reports its standardized model inputs.
    pub fn predict_row(&self, features: &ExtractedFeatures, row: usize) -> Result<LabelPrediction> {
        let fused = fuse_features(&features.parts(), self.modalities)?.take_rows(&[row]);
        let z = self.pipeline.transform(&fused)?;
        let class = self.pipeline.model.predict(z.view())?[0];
        Ok(LabelPrediction {
            class,
            features: self
                .pipeline
                .selected_columns
                .iter()
                .zip(z.row(0))
                .map(|(name, &z)| FeatureValue { name: name.clone(), z })
                .collect(),
        })
    }
}

/// A bundle file path, or every `*.model.json` inside a directory (sorted).
pub fn bundle_paths(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".model.json")))
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(Error::Data(format!("no *.model.json bundles in {}", path.display())));
    }
    Ok(out)
}

pub fn predict_record(bundles: &[ModelBundle], features: &ExtractedFeatures, record_id: &str) -> Result<Predictions> {
    let row = features
        .audio
        .row_ids()
        .iter()
        .position(|id| id == record_id)
        .ok_or_else(|| Error::Data(format!("record `{record_id}` not found in features")))?;
    let mut labels = std::collections::BTreeMap::new();
    for b in bundles {
        labels.insert(b.label, b.predict_row(features, row)?);
    }
    Ok(Predictions {
        record_id: record_id.to_string(),
        labels,
    })
}
