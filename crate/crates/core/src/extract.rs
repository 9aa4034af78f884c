//! Per-record feature extraction over a manifest and the on-disk feature
//! cache.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::{extract_recording_audio_features, read_wav, recording_feature_names, AudioConfig};
use crate::error::{Error, Result};
use crate::eval::config_hash;
use crate::exec::Execution;
use crate::lexical::{lexical_feature_names, LexicalConfig, LexicalExtractor, Transcript};
use crate::model::{FeatureMatrix, InterviewRecord, Modality};
use crate::visual::{aggregate_visual, load_landmark_track, visual_feature_names, VisualConfig};

pub const CACHE_VERSION: &str = concat!("features-", env!("CARGO_PKG_VERSION"));
pub const CACHE_INDEX: &str = "cache.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub audio: AudioConfig,
    pub visual: VisualConfig,
    pub lexical: LexicalConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedFeatures {
    pub audio: FeatureMatrix,
    pub video: FeatureMatrix,
    pub lexical: FeatureMatrix,
}

impl ExtractedFeatures {
    pub fn parts(&self) -> Vec<FeatureMatrix> {
        vec![self.audio.clone(), self.video.clone(), self.lexical.clone()]
    }

    pub fn part(&self, m: Modality) -> &FeatureMatrix {
        match m {
            Modality::Audio => &self.audio,
            Modality::Video => &self.video,
            Modality::Lexical => &self.lexical,
        }
    }
}

fn in_record<'a>(record: &'a InterviewRecord, field: &'static str) -> impl Fn(Error) -> Error + 'a {
    move |e| Error::InvalidRecord {
        record: record.id.clone(),
        field: field.into(),
        message: e.to_string(),
    }
}

struct RecordFeatures {
    audio: Vec<f64>,
    video: Vec<f64>,
    lexical: Vec<f64>,
}

fn extract_record(
    record: &InterviewRecord,
    config: &FeatureConfig,
    lexical: &LexicalExtractor,
) -> Result<RecordFeatures> {
    let signal = read_wav(&record.audio_path).map_err(in_record(record, "audio"))?;
    let audio = extract_recording_audio_features(&signal, &config.audio.frame, config.audio.include_std)
        .map_err(in_record(record, "audio"))?;
    let track = load_landmark_track(&record.landmarks_path).map_err(in_record(record, "landmarks"))?;
    let video = aggregate_visual(&track, &config.visual).map_err(in_record(record, "landmarks"))?;
    let transcript =
        Transcript::load(&record.transcript_path, record.duration_s).map_err(in_record(record, "transcript"))?;
    Ok(RecordFeatures {
        audio: audio.values,
        video: video.values,
        lexical: lexical.extract(&transcript).values,
    })
}

/// Extracts all three modalities for every record, rows in manifest order.
/// `base` resolves relative lexicon paths in the lexical config.
pub fn extract_features(
    records: &[InterviewRecord],
    config: &FeatureConfig,
    base: &Path,
    exec: Execution,
) -> Result<ExtractedFeatures> {
    if records.is_empty() {
        return Err(Error::Data("manifest has no records".into()));
    }
    let lexical = LexicalExtractor::from_config(&config.lexical, base)?;
    let rows = exec.try_map(records, |r| extract_record(r, config, &lexical))?;
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let collect = |f: fn(&RecordFeatures) -> &Vec<f64>| rows.iter().map(|r| f(r).clone()).collect::<Vec<_>>();
    Ok(ExtractedFeatures {
        audio: FeatureMatrix::from_rows(
            Modality::Audio,
            &recording_feature_names(config.audio.include_std),
            ids.clone(),
            &collect(|r| &r.audio),
        )?,
        video: FeatureMatrix::from_rows(Modality::Video, &visual_feature_names(), ids.clone(), &collect(|r| &r.video))?,
        lexical: FeatureMatrix::from_rows(Modality::Lexical, &lexical_feature_names(), ids, &collect(|r| &r.lexical))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheIndex {
    pub version: String,
    pub config_hash: String,
    pub record_ids: Vec<String>,
    pub files: Vec<String>,
}

fn file_name(m: Modality) -> String {
    format!("{}.csv", m.as_str())
}

/// Writes `audio.csv`, `video.csv`, `lexical.csv` and `cache.json`.
pub fn write_cache(dir: &Path, features: &ExtractedFeatures, config: &FeatureConfig) -> Result<CacheIndex> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for m in Modality::ORDER {
        let name = file_name(m);
        features.part(m).write_csv(dir.join(&name))?;
        files.push(name);
    }
    let index = CacheIndex {
        version: CACHE_VERSION.into(),
        config_hash: config_hash(config)?,
        record_ids: features.audio.row_ids().to_vec(),
        files,
    };
    let path = dir.join(CACHE_INDEX);
    let text = serde_json::to_string_pretty(&index).map_err(|e| Error::Data(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(index)
}

/// Reads a cache directory. The three CSVs are required; when `config` is
/// given and `cache.json` exists, its version and config hash must match.
pub fn read_cache(dir: &Path, config: Option<&FeatureConfig>) -> Result<ExtractedFeatures> {
    let index_path = dir.join(CACHE_INDEX);
    if let (Some(cfg), true) = (config, index_path.exists()) {
        let text = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let index: CacheIndex = serde_json::from_str(&text).map_err(|e| Error::Parse {
            context: index_path.display().to_string(),
            message: e.to_string(),
        })?;
        if index.version != CACHE_VERSION {
            return Err(Error::Data(format!(
                "feature cache version {} does not match {CACHE_VERSION}; re-run extract",
                index.version
            )));
        }
        if index.config_hash != config_hash(cfg)? {
            return Err(Error::Data("feature cache was built with a different feature config; re-run extract".into()));
        }
    }
    let read = |m| FeatureMatrix::read_csv(dir.join(file_name(m)), m);
    let features = ExtractedFeatures {
        audio: read(Modality::Audio)?,
        video: read(Modality::Video)?,
        lexical: read(Modality::Lexical)?,
    };
    for m in [Modality::Video, Modality::Lexical] {
        if features.part(m).row_ids() != features.audio.row_ids() {
            return Err(Error::RowIdMismatch(format!("{} rows differ from audio rows", file_name(m))));
        }
    }
    Ok(features)
}
