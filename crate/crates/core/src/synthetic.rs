//! Generated data with known structure: a feature-level planted-signal
//! corpus for end-to-end accuracy checks, and a small raw corpus (WAV,
//! landmark track, transcript, manifest) for exercising extraction.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

use crate::audio::{recording_feature_names, write_wav_mono};
use crate::error::{Error, Result};
use crate::eval::Dataset;
use crate::lexical::lexical_feature_names;
use crate::model::{FeatureMatrix, LabelName, Modality};
use crate::visual::visual_feature_names;

pub const PLANTED_PER_LABEL: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub dataset: Dataset,
    /// Audio columns that carry each label's class.
    pub planted: BTreeMap<LabelName, Vec<String>>,
}

/// Balanced classes 1..=7 in shuffled order.
fn balanced_classes(n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut c: Vec<u8> = (0..n).map(|i| (i % 7) as u8 + 1).collect();
    c.shuffle(rng);
    c
}

/// Orthogonal polynomial codes of a class in 1..=7: the first alone
/// identifies the class, and the three are uncorrelated over balanced
/// classes so none is removed by correlation pruning.
pub fn planted_codes(class: u8) -> [f64; PLANTED_PER_LABEL] {
    let u = class as f64 - 4.0;
    [u, u * u - 4.0, u * u * u - 7.0 * u]
}

/// `n` rows over the canonical audio/video/lexical columns. For label l the
/// audio columns 3l, 3l+1, 3l+2 hold [`planted_codes`] of the class plus
/// N(0, noise_sd²) noise; every other column is N(0, 1).
pub fn planted_signal_corpus(n: usize, seed: u64, noise_sd: f64) -> Result<PlantedCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::invalid("noise_sd", e.to_string()))?;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let ids: Vec<String> = (0..n).map(|i| format!("syn_{i:03}")).collect();
    let labels: BTreeMap<LabelName, Vec<u8>> =
        LabelName::ALL.iter().map(|&l| (l, balanced_classes(n, &mut rng))).collect();

    let audio_names = recording_feature_names(false);
    let mut planted = BTreeMap::new();
    let mut owner = vec![None; audio_names.len()];
    for (li, &l) in LabelName::ALL.iter().enumerate() {
        let cols: Vec<usize> = (li * PLANTED_PER_LABEL..(li + 1) * PLANTED_PER_LABEL).collect();
        for (k, &c) in cols.iter().enumerate() {
            owner[c] = Some((l, k));
        }
        planted.insert(l, cols.iter().map(|&c| audio_names[c].clone()).collect());
    }

    let audio_rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            owner
                .iter()
                .map(|o| match o {
                    Some((l, k)) => planted_codes(labels[l][i])[*k] + noise.sample(&mut rng),
                    None => unit.sample(&mut rng),
                })
                .collect()
        })
        .collect();
    let mut noise_part = |names: &[String]| -> Vec<Vec<f64>> {
        (0..n).map(|_| names.iter().map(|_| unit.sample(&mut rng)).collect()).collect()
    };
    let video_names = visual_feature_names();
    let lexical_names = lexical_feature_names();
    let video_rows = noise_part(&video_names);
    let lexical_rows = noise_part(&lexical_names);

    let parts = vec![
        FeatureMatrix::from_rows(Modality::Audio, &audio_names, ids.clone(), &audio_rows)?,
        FeatureMatrix::from_rows(Modality::Video, &video_names, ids.clone(), &video_rows)?,
        FeatureMatrix::from_rows(Modality::Lexical, &lexical_names, ids, &lexical_rows)?,
    ];
    Ok(PlantedCorpus {
        dataset: Dataset {
            parts,
            labels,
            groups: vec![None; n],
        },
        planted,
    })
}

const WORDS: &[&str] = &[
    "i", "really", "enjoy", "working", "with", "people", "and", "the", "project", "was", "great", "we", "built",
    "a", "team", "that", "solved", "problems", "quickly", "my", "manager", "trusted", "me", "to", "lead", "new",
    "analysis", "maybe", "perhaps", "worried", "happy", "difficult", "results", "improved", "customers", "think",
];
const FILLERS: &[&str] = &["um", "uh", "like", "you know"];

fn transcript(rng: &mut ChaCha8Rng, sentences: usize, filler_rate: f64) -> String {
    let mut out = Vec::new();
    for _ in 0..sentences {
        let len = rng.random_range(5..12);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            if rng.random::<f64>() < filler_rate {
                words.push(FILLERS[rng.random_range(0..FILLERS.len())]);
            }
            words.push(WORDS[rng.random_range(0..WORDS.len())]);
        }
        let mut s = words.join(" ");
        s[..1].make_ascii_uppercase();
        out.push(s + ".");
    }
    out.join(" ")
}

fn yaw_rotation(theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

/// Writes `n_records` raw records plus `manifest.json` into `dir` and
/// returns the manifest path. Each record has a 2 s, 16 kHz voiced tone,
/// a 60-frame landmark track and a short transcript; consecutive record
/// pairs share a candidate id.
pub fn write_raw_corpus(dir: &Path, n_records: usize, seed: u64) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs_hz = 16_000u32;
    let hiss = Normal::new(0.0, 0.01).expect("normal");
    let mut records = Vec::new();
    for r in 0..n_records {
        let id = format!("rec_{:02}", r + 1);
        let f0 = 110.0 + 30.0 * r as f64;
        let amp = 0.2 + 0.05 * (r % 4) as f64;
        let n = 2 * fs_hz as usize;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / fs_hz as f64;
                let syllable = 0.6 + 0.4 * (2.0 * PI * 3.0 * t).sin();
                let v = amp * syllable * ((2.0 * PI * f0 * t).sin() + 0.3 * (4.0 * PI * f0 * t).sin());
                (v + hiss.sample(&mut rng)).clamp(-1.0, 1.0)
            })
            .collect();
        let wav = format!("{id}.wav");
        write_wav_mono(dir.join(&wav), &samples, fs_hz)?;

        let mut track = String::new();
        let smile_bias = rng.random::<f64>();
        for k in 0..60 {
            let t = k as f64 / 30.0;
            let jx = rng.random_range(-1.0..1.0);
            let jy = rng.random_range(-1.0..1.0);
            let mouth = 40.0 + 8.0 * smile_bias + rng.random_range(-2.0..2.0);
            let lm = json!({
                "nose": [320.0 + jx, 240.0 + jy],
                "chin": [320.0 + jx, 330.0 + jy],
                "lel": [270.0 + jx, 200.0 + jy],
                "rer": [370.0 + jx, 200.0 + jy],
                "lm_l": [320.0 - mouth / 2.0 + jx, 290.0 + jy],
                "lm_r": [320.0 + mouth / 2.0 + jx, 290.0 + jy],
            });
            let mut frame = json!({ "t": t, "lm": lm });
            if k % 10 != 9 {
                frame["R"] = json!(yaw_rotation(0.2 * (t * (1.0 + r as f64)).sin()));
            }
            if k % 2 == 0 {
                frame["smile"] = json!((smile_bias + rng.random_range(-0.2..0.2)).clamp(0.0, 1.0));
            }
            track.push_str(&frame.to_string());
            track.push('\n');
        }
        let lm_file = format!("{id}.landmarks.jsonl");
        fs::write(dir.join(&lm_file), track).map_err(|e| Error::io(dir.join(&lm_file), e))?;

        let txt = format!("{id}.txt");
        let text = transcript(&mut rng, 3 + r % 3, 0.05 * (r % 3) as f64);
        fs::write(dir.join(&txt), text + "\n").map_err(|e| Error::io(dir.join(&txt), e))?;

        let labels: serde_json::Map<String, serde_json::Value> = LabelName::ALL
            .iter()
            .map(|l| (l.as_str().to_string(), json!(rng.random_range(1..=7))))
            .collect();
        records.push(json!({
            "id": id,
            "candidate": format!("cand_{}", r / 2 + 1),
            "audio": wav,
            "landmarks": lm_file,
            "transcript": txt,
            "duration_s": 2.0,
            "labels": labels,
        }));
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&json!({ "records": records })).expect("json");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
