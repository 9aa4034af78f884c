//! Transcript features: speaking style rates, sentence sentiment, tone
//! category shares, and part-of-speech counts.

mod lexicon;
mod text;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use lexicon::{LexiconTagger, Pos, PosTagger, SentimentLexicon, ToneCategory, ToneLexicon};
pub use text::{normalize_text, tokenize, CleanText};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub raw_text: String,
    pub duration_s: f64,
}

impl Transcript {
    pub fn new(raw_text: String, duration_s: f64) -> Result<Self> {
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(Error::invalid("duration_s", format!("must be > 0 (got {duration_s})")));
        }
        Ok(Transcript {
            raw_text,
            duration_s,
        })
    }

    pub fn load(path: impl AsRef<Path>, duration_s: f64) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Transcript::new(raw, duration_s)
    }
}

/// Filler words and phrases; phrases are space-separated token sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct FillerLexicon {
    single: HashSet<String>,
    phrases: Vec<Vec<String>>,
}

pub const DEFAULT_FILLERS: [&str; 7] = ["um", "uh", "er", "ah", "hmm", "like", "you know"];

impl Default for FillerLexicon {
    fn default() -> Self {
        FillerLexicon::new(DEFAULT_FILLERS)
    }
}

impl FillerLexicon {
    pub fn new<S: AsRef<str>>(entries: impl IntoIterator<Item = S>) -> Self {
        let mut single = HashSet::new();
        let mut phrases = Vec::new();
        for e in entries {
            let toks: Vec<String> = normalize_text(e.as_ref())
                .text
                .split(' ')
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            match toks.len() {
                0 => {}
                1 => {
                    single.insert(toks.into_iter().next().unwrap());
                }
                _ => phrases.push(toks),
            }
        }
        FillerLexicon { single, phrases }
    }

    pub fn count(&self, tokens: &[&str]) -> usize {
        let singles = tokens.iter().filter(|t| self.single.contains(**t)).count();
        let multi: usize = self
            .phrases
            .iter()
            .map(|p| {
                tokens
                    .windows(p.len())
                    .filter(|w| w.iter().zip(p).all(|(a, b)| *a == b))
                    .count()
            })
            .sum();
        singles + multi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeakingStyle {
    pub words_per_min: f64,
    pub unique_words_per_min: f64,
    pub unique_word_count: usize,
    pub filler_per_min: f64,
}

pub fn speaking_style(tokens: &[&str], duration_s: f64, fillers: &FillerLexicon) -> SpeakingStyle {
    assert!(duration_s > 0.0, "duration must be positive");
    let per_min = |count: usize| 60.0 * count as f64 / duration_s;
    let unique: HashSet<&str> = tokens.iter().copied().collect();
    SpeakingStyle {
        words_per_min: per_min(tokens.len()),
        unique_words_per_min: per_min(unique.len()),
        unique_word_count: unique.len(),
        filler_per_min: per_min(fillers.count(tokens)),
    }
}

/// Sum of per-token sentiment over one sentence.
pub fn sentence_sentiment(tokens: &[&str], lexicon: &SentimentLexicon) -> i64 {
    tokens.iter().map(|t| lexicon.get(t)).sum()
}

/// Per-sentence category shares (L1-normalized, or all zero without hits)
/// averaged over sentences.
pub fn tone_scores(sentences: &[Vec<&str>], lexicon: &ToneLexicon) -> [f64; 6] {
    let mut acc = [0.0; 6];
    if sentences.is_empty() {
        return acc;
    }
    for s in sentences {
        let shares = sentence_tone(s, lexicon);
        for (a, v) in acc.iter_mut().zip(shares) {
            *a += v;
        }
    }
    acc.iter_mut().for_each(|a| *a /= sentences.len() as f64);
    acc
}

pub fn sentence_tone(tokens: &[&str], lexicon: &ToneLexicon) -> [f64; 6] {
    let mut w = [0.0; 6];
    for t in tokens {
        if let Some(weights) = lexicon.get(t) {
            for (a, v) in w.iter_mut().zip(weights) {
                *a += v;
            }
        }
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|v| *v /= total);
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PosCounts {
    pub nouns: usize,
    pub verbs: usize,
    pub adjectives: usize,
}

pub fn pos_counts(tokens: &[&str], tagger: &dyn PosTagger) -> PosCounts {
    let mut c = PosCounts::default();
    for t in tokens {
        match tagger.tag(t) {
            Pos::Noun => c.nouns += 1,
            Pos::Verb => c.verbs += 1,
            Pos::Adjective => c.adjectives += 1,
            Pos::Other => {}
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LexicalConfig {
    pub fillers: Vec<String>,
    /// Optional replacement lexicon files (JSON); bundled ones otherwise.
    pub tone_lexicon: Option<String>,
    pub sentiment_lexicon: Option<String>,
    pub pos_lexicon: Option<String>,
}

impl Default for LexicalConfig {
    fn default() -> Self {
        LexicalConfig {
            fillers: DEFAULT_FILLERS.iter().map(|s| s.to_string()).collect(),
            tone_lexicon: None,
            sentiment_lexicon: None,
            pos_lexicon: None,
        }
    }
}

/// Everything needed to featurize transcripts.
pub struct LexicalExtractor {
    pub fillers: FillerLexicon,
    pub tone: ToneLexicon,
    pub sentiment: SentimentLexicon,
    pub tagger: Box<dyn PosTagger>,
}

impl Default for LexicalExtractor {
    fn default() -> Self {
        LexicalExtractor {
            fillers: FillerLexicon::default(),
            tone: ToneLexicon::bundled(),
            sentiment: SentimentLexicon::bundled(),
            tagger: Box::new(LexiconTagger::bundled()),
        }
    }
}

pub fn lexical_feature_names() -> Vec<String> {
    [
        "words_per_min",
        "unique_words_per_min",
        "unique_word_count",
        "filler_per_min",
        "sentiment_mean",
        "tone_joy",
        "tone_sadness",
        "tone_tentative",
        "tone_analytical",
        "tone_fear",
        "tone_anger",
        "noun_count",
        "verb_count",
        "adjective_count",
        "sentence_count",
    ]
    .map(String::from)
    .to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordingLexicalFeatures {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl RecordingLexicalFeatures {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

impl LexicalExtractor {
    pub fn from_config(config: &LexicalConfig, base: &Path) -> Result<Self> {
        let mut ex = LexicalExtractor {
            fillers: FillerLexicon::new(&config.fillers),
            ..LexicalExtractor::default()
        };
        if let Some(p) = &config.tone_lexicon {
            ex.tone = ToneLexicon::load(base.join(p))?;
        }
        if let Some(p) = &config.sentiment_lexicon {
            ex.sentiment = SentimentLexicon::load(base.join(p))?;
        }
        if let Some(p) = &config.pos_lexicon {
            ex.tagger = Box::new(LexiconTagger::load(base.join(p))?);
        }
        Ok(ex)
    }

    pub fn extract(&self, transcript: &Transcript) -> RecordingLexicalFeatures {
        let clean = normalize_text(&transcript.raw_text);
        let tokens = tokenize(&clean.text);
        let sentences: Vec<Vec<&str>> = clean.sentences.iter().map(|s| tokenize(s)).collect();
        let style = speaking_style(&tokens, transcript.duration_s, &self.fillers);
        let sentiment_mean = if sentences.is_empty() {
            0.0
        } else {
            sentences
                .iter()
                .map(|s| sentence_sentiment(s, &self.sentiment) as f64)
                .sum::<f64>()
                / sentences.len() as f64
        };
        let tone = tone_scores(&sentences, &self.tone);
        let pos = pos_counts(&tokens, self.tagger.as_ref());
        let mut values = vec![
            style.words_per_min,
            style.unique_words_per_min,
            style.unique_word_count as f64,
            style.filler_per_min,
            sentiment_mean,
        ];
        values.extend(tone);
        values.extend([
            pos.nouns as f64,
            pos.verbs as f64,
            pos.adjectives as f64,
            sentences.len() as f64,
        ]);
        RecordingLexicalFeatures {
            names: lexical_feature_names(),
            values,
        }
    }
}
