use crate::error::{Error, Result};

/// Fraction of exact matches.
pub fn accuracy<C: PartialEq>(pred: &[C], truth: &[C]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            context: "accuracy predictions vs truth".into(),
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Data("accuracy of an empty set".into()));
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// 7 × 7 counts indexed [truth − 1][pred − 1].
pub fn confusion_matrix(pred: &[u8], truth: &[u8]) -> [[usize; 7]; 7] {
    let mut m = [[0; 7]; 7];
    for (&p, &t) in pred.iter().zip(truth) {
        if (1..=7).contains(&p) && (1..=7).contains(&t) {
            m[t as usize - 1][p as usize - 1] += 1;
        }
    }
    m
}
