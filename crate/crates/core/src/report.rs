//! Candidate feedback reports built from per-label predictions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LabelName, MAX_SCORE, MIN_SCORE};

const BUNDLED_TEMPLATES: &str = include_str!("../data/feedback_templates.json");
pub const TOP_FEATURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "needs-work")]
    NeedsWork,
    #[serde(rename = "adequate")]
    Adequate,
    #[serde(rename = "strong")]
    Strong,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::NeedsWork => "needs-work",
            Band::Adequate => "adequate",
            Band::Strong => "strong",
        }
    }
}

/// Upper class of the two lower bands; the rest is `strong`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub needs_work_max: u8,
    pub adequate_max: u8,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            needs_work_max: 2,
            adequate_max: 5,
        }
    }
}

impl BandConfig {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_SCORE <= self.needs_work_max
            && self.needs_work_max < self.adequate_max
            && self.adequate_max < MAX_SCORE)
        {
            return Err(Error::invalid(
                "bands",
                format!(
                    "need 1 ≤ needs_work_max < adequate_max < 7 (got {}, {})",
                    self.needs_work_max, self.adequate_max
                ),
            ));
        }
        Ok(())
    }

    pub fn band(&self, class: u8) -> Band {
        if class <= self.needs_work_max {
            Band::NeedsWork
        } else if class <= self.adequate_max {
            Band::Adequate
        } else {
            Band::Strong
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub bands: BandConfig,
    /// Replacement template file; the bundled templates otherwise.
    pub templates: Option<String>,
}

/// One sentence per (label, band).
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackTemplates(BTreeMap<LabelName, BTreeMap<Band, String>>);

impl FeedbackTemplates {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TEMPLATES).expect("bundled templates are complete")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map: BTreeMap<LabelName, BTreeMap<Band, String>> = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: "feedback templates".into(),
            message: e.to_string(),
        })?;
        for l in LabelName::ALL {
            for b in [Band::NeedsWork, Band::Adequate, Band::Strong] {
                if !map.get(&l).is_some_and(|m| m.contains_key(&b)) {
                    return Err(Error::Data(format!("feedback templates lack {l}/{}", b.as_str())));
                }
            }
        }
        Ok(FeedbackTemplates(map))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn from_config(config: &ReportConfig, base: &Path) -> Result<Self> {
        match &config.templates {
            Some(p) => Self::load(base.join(p)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn get(&self, label: LabelName, band: Band) -> &str {
        &self.0[&label][&band]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureValue {
    pub name: String,
    /// Standardized value on the bundle's training statistics.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelPrediction {
    pub class: u8,
    /// Model input features for this record, in model column order.
    pub features: Vec<FeatureValue>,
}

/// Output of `predict` for one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub record_id: String,
    pub labels: BTreeMap<LabelName, LabelPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelFeedback {
    pub label: LabelName,
    pub predicted_class: u8,
    pub band: Band,
    pub feedback: String,
    pub top_features: Vec<FeatureValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub record_id: String,
    pub labels: Vec<LabelFeedback>,
}

/// Largest |z| first; equal magnitudes keep model column order.
pub fn top_features(features: &[FeatureValue], n: usize) -> Vec<FeatureValue> {
    let mut sorted = features.to_vec();
    sorted.sort_by(|a, b| b.z.abs().total_cmp(&a.z.abs()));
    sorted.truncate(n);
    sorted
}

pub fn render_report(
    predictions: &Predictions,
    bands: &BandConfig,
    templates: &FeedbackTemplates,
) -> Result<FeedbackReport> {
    bands.validate()?;
    let labels = LabelName::ALL
        .iter()
        .map(|&l| {
            let p = predictions
                .labels
                .get(&l)
                .ok_or_else(|| Error::Data(format!("predictions lack label {l}")))?;
            if !(MIN_SCORE..=MAX_SCORE).contains(&p.class) {
                return Err(Error::Data(format!("{l} prediction {} outside 1..=7", p.class)));
            }
            let band = bands.band(p.class);
            Ok(LabelFeedback {
                label: l,
                predicted_class: p.class,
                band,
                feedback: templates.get(l, band).to_string(),
                top_features: top_features(&p.features, TOP_FEATURES),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeedbackReport {
        record_id: predictions.record_id.clone(),
        labels,
    })
}

impl FeedbackReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("Interview feedback for {}\n", self.record_id);
        for l in &self.labels {
            let _ = write!(
                out,
                "\n{}: {}/7 ({})\n  {}\n",
                l.label.title(),
                l.predicted_class,
                l.band.as_str(),
                l.feedback
            );
            if !l.top_features.is_empty() {
                let feats: Vec<String> = l.top_features.iter().map(|f| format!("{} (z={:+.2})", f.name, f.z)).collect();
                let _ = writeln!(out, "  Top features: {}", feats.join(", "));
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Data(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preds(class: u8) -> Predictions {
        Predictions {
            record_id: "r1".into(),
            labels: LabelName::ALL
                .iter()
                .map(|&l| (l, LabelPrediction { class, features: vec![] }))
                .collect(),
        }
    }

    #[test]
    fn band_mapping_examples() {
        let b = BandConfig::default();
        assert_eq!((1..=7).map(|c| b.band(c)).collect::<Vec<_>>(), {
            use Band::*;
            vec![NeedsWork, NeedsWork, Adequate, Adequate, Adequate, Strong, Strong]
        });
        let t = FeedbackTemplates::bundled();
        let r = render_report(&preds(1), &b, &t).unwrap();
        let sr = r.labels.iter().find(|l| l.label == LabelName::SpeakingRate).unwrap();
        assert_eq!(sr.band, Band::NeedsWork);
        assert!(sr.feedback.contains("pace"));
        let r = render_report(&preds(4), &b, &t).unwrap();
        assert_eq!(r.labels.iter().find(|l| l.label == LabelName::Calmness).unwrap().band, Band::Adequate);
        let r = render_report(&preds(7), &b, &t).unwrap();
        assert!(r.labels.iter().all(|l| l.band == Band::Strong));
    }

    #[test]
    fn missing_label_and_bad_bands() {
        let mut p = preds(3);
        p.labels.remove(&LabelName::Focused);
        assert!(render_report(&p, &BandConfig::default(), &FeedbackTemplates::bundled()).is_err());
        let bad = BandConfig { needs_work_max: 5, adequate_max: 5 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn top_features_by_magnitude() {
        let f: Vec<FeatureValue> = [("a", 0.1), ("b", -2.0), ("c", 1.5), ("d", 2.0), ("e", -0.3), ("f", 0.0)]
            .iter()
            .map(|(n, z)| FeatureValue { name: n.to_string(), z: *z })
            .collect();
        let names: Vec<String> = top_features(&f, 5).into_iter().map(|f| f.name).collect();
        assert_eq!(names, ["b", "d", "c", "e", "a"]);
    }
}
