use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Cleaned transcript text plus its sentences (each cleaned the same way).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CleanText {
    pub text: String,
    pub sentences: Vec<String>,
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn clean_piece(piece: &str) -> String {
    let stripped: String = piece
        .chars()
        .map(|c| if c.is_whitespace() { ' ' } else { c })
        .filter(|c| c.is_alphanumeric() || *c == ' ')
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercases, folds diacritics, records sentence boundaries at `.`, `!`
/// and `?`, strips punctuation and collapses whitespace.
pub fn normalize_text(raw: &str) -> CleanText {
    let folded: String = raw
        .to_lowercase()
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .nfc()
        .collect();
    let sentences: Vec<String> = folded
        .split(is_sentence_end)
        .map(clean_piece)
        .filter(|s| !s.is_empty())
        .collect();
    CleanText {
        text: sentences.join(" "),
        sentences,
    }
}

/// Splits cleaned text on single spaces.
pub fn tokenize(cleaned: &str) -> Vec<&str> {
    if cleaned.is_empty() {
        Vec::new()
    } else {
        cleaned.split(' ').collect()
    }
}
