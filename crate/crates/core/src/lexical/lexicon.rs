//! Word-level lexicons: tone weights, sentence sentiment, and part of speech.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

const BUNDLED_TONE: &str = include_str!("../../data/tone_lexicon.json");
const BUNDLED_SENTIMENT: &str = include_str!("../../data/sentiment_lexicon.json");
const BUNDLED_POS: &str = include_str!("../../data/pos_lexicon.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum ToneCategory {
    Joy,
    Sadness,
    Tentative,
    Analytical,
    Fear,
    Anger,
}

impl ToneCategory {
    pub const ALL: [ToneCategory; 6] = [
        ToneCategory::Joy,
        ToneCategory::Sadness,
        ToneCategory::Tentative,
        ToneCategory::Analytical,
        ToneCategory::Fear,
        ToneCategory::Anger,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!("{what}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// word → six non-negative category weights.
///
/// File schema: `{"word": {"Joy": 1.0, "Fear": 0.5}, ...}`; absent categories are 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ToneLexicon {
    entries: BTreeMap<String, [f64; 6]>,
}

impl ToneLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TONE).expect("bundled tone lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read(path.as_ref())?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, BTreeMap<ToneCategory, f64>> = parse_json(text, "tone lexicon")?;
        let mut entries = BTreeMap::new();
        for (word, weights) in raw {
            let mut w = [0.0; 6];
            for (cat, v) in weights {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Data(format!("tone lexicon: `{word}` has invalid weight {v}")));
                }
                w[cat.index()] = v;
            }
            entries.insert(word, w);
        }
        Ok(ToneLexicon { entries })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, [f64; 6])>) -> Result<Self> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        if entries.values().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Data("tone lexicon weights must be finite and ≥ 0".into()));
        }
        Ok(ToneLexicon { entries })
    }

    pub fn get(&self, word: &str) -> Option<&[f64; 6]> {
        self.entries.get(word)
    }
}

/// word → sentiment in {-1, 0, +1}. File schema: `{"word": 1, ...}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentimentLexicon {
    entries: BTreeMap<String, i8>,
}

impl SentimentLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_SENTIMENT).expect("bundled sentiment lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read(path.as_ref())?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, i64> = parse_json(text, "sentiment lexicon")?;
        Self::from_entries(raw)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, i64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (word, v) in entries {
            if !(-1..=1).contains(&v) {
                return Err(Error::Data(format!("sentiment lexicon: `{word}` value {v} ∉ {{-1,0,1}}")));
            }
            out.insert(word, v as i8);
        }
        Ok(SentimentLexicon { entries: out })
    }

    pub fn get(&self, word: &str) -> i64 {
        self.entries.get(word).copied().unwrap_or(0) as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Pos {
    #[serde(rename = "N")]
    Noun,
    #[serde(rename = "V")]
    Verb,
    #[serde(rename = "Adj")]
    Adjective,
    #[serde(other)]
    Other,
}

pub trait PosTagger: Send + Sync {
    fn tag(&self, token: &str) -> Pos;
}

/// Dictionary lookup with a suffix-rule fallback for unknown words.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconTagger {
    entries: BTreeMap<String, Pos>,
}

const ADJ_SUFFIXES: [&str; 8] = ["ous", "ful", "ive", "able", "ible", "less", "ical", "ish"];
const NOUN_SUFFIXES: [&str; 6] = ["tion", "sion", "ment", "ness", "ity", "ship"];
const VERB_SUFFIXES: [&str; 3] = ["ing", "ed", "ize"];

impl LexiconTagger {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_POS).expect("bundled POS lexicon is valid")
    }

    /// File schema: `{"word": "N" | "V" | "Adj", ...}`.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(LexiconTagger {
            entries: parse_json(text, "POS lexicon")?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read(path.as_ref())?)
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, token: &str) -> Pos {
        if let Some(p) = self.entries.get(token) {
            return *p;
        }
        // short words are mostly function words
        if token.chars().count() < 5 {
            return Pos::Other;
        }
        let ends = |set: &[&str]| set.iter().any(|s| token.ends_with(s));
        if ends(&NOUN_SUFFIXES) {
            Pos::Noun
        } else if ends(&ADJ_SUFFIXES) {
            Pos::Adjective
        } else if ends(&VERB_SUFFIXES) {
            Pos::Verb
        } else {
            Pos::Other
        }
    }
}
