//! Top-level configuration file (JSON). Every field is optional and
//! defaults to the values documented on each section.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::ModelFamily;
use crate::error::{Error, Result};
use crate::eval::ExperimentConfig;
use crate::extract::FeatureConfig;
use crate::model::ModalityMask;
use crate::preprocess::SelectorSpec;
use crate::report::ReportConfig;

/// Settings for `train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub modalities: ModalityMask,
    pub selector: SelectorSpec,
    pub model: ModelFamily,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            modalities: ModalityMask::ALL,
            selector: SelectorSpec::FdrBh { q: 0.05 },
            model: ModelFamily::RandomForest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub features: FeatureConfig,
    pub experiment: ExperimentConfig,
    pub train: TrainConfig,
    pub report: ReportConfig,
}

impl Config {
    pub fn parse(text: &str, context: &str) -> Result<Config> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: format!("{context}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
