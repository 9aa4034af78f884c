//! Fold assignment for k-fold cross-validation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index of every row.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("k", format!("need at least 2 folds (got {k})")));
    }
    if n < k {
        return Err(Error::Data(format!("cannot split {n} rows into {k} folds")));
    }
    Ok(())
}

/// Rows of each class (ascending class order) are shuffled and dealt to
/// folds by one cursor that carries over between classes.
pub fn stratified_kfold<C: Ord + Copy>(y: &[C], k: usize, seed: u64) -> Result<FoldPlan> {
    check_k(y.len(), k)?;
    let mut by_class: BTreeMap<C, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; y.len()];
    let mut cursor = 0;
    for rows in by_class.values_mut() {
        rows.shuffle(&mut rng);
        for &r in rows.iter() {
            assignments[r] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    Ok(FoldPlan { k, assignments })
}

/// Keeps every group inside one fold. Rows without a group form their own
/// singleton group. Groups are shuffled, then placed largest first into the
/// currently smallest fold.
pub fn group_kfold(groups: &[Option<String>], k: usize, seed: u64) -> Result<FoldPlan> {
    check_k(groups.len(), k)?;
    let mut members: BTreeMap<(u8, String), Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        let key = match g {
            Some(name) => (0, name.clone()),
            None => (1, format!("{i:012}")),
        };
        members.entry(key).or_default().push(i);
    }
    if members.len() < k {
        return Err(Error::Data(format!(
            "cannot split {} groups into {k} folds",
            members.len()
        )));
    }
    let mut list: Vec<Vec<usize>> = members.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    list.shuffle(&mut rng);
    list.sort_by_key(|m| std::cmp::Reverse(m.len()));
    let mut sizes = vec![0usize; k];
    let mut assignments = vec![0; groups.len()];
    for m in list {
        let fold = (0..k).min_by_key(|&f| (sizes[f], f)).unwrap();
        sizes[fold] += m.len();
        for r in m {
            assignments[r] = fold;
        }
    }
    Ok(FoldPlan { k, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_stratification() {
        let plan = stratified_kfold(&[1u8, 1, 1, 2, 2, 2], 3, 0).unwrap();
        for f in 0..3 {
            let t = plan.test_indices(f);
            assert_eq!(t.len(), 2);
            assert_eq!(t.iter().filter(|&&i| i < 3).count(), 1);
        }
    }

    #[test]
    fn boundary_and_errors() {
        let plan = stratified_kfold(&[1u8, 2, 3], 3, 9).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1, 1, 1]);
        assert!(stratified_kfold(&[1u8, 2], 3, 0).is_err());
        assert!(stratified_kfold(&[1u8, 2], 1, 0).is_err());
    }

    #[test]
    fn small_classes_do_not_leave_folds_empty() {
        let plan = stratified_kfold(&[1u8, 3], 2, 0).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1, 1]);
    }

    #[test]
    fn groups_stay_together() {
        let g: Vec<Option<String>> = ["a", "a", "b", "b", "c", "c", "d"]
            .iter()
            .map(|s| Some(s.to_string()))
            .collect();
        let plan = group_kfold(&g, 3, 4).unwrap();
        for pair in [(0, 1), (2, 3), (4, 5)] {
            assert_eq!(plan.assignments[pair.0], plan.assignments[pair.1]);
        }
        assert!(plan.fold_sizes().iter().all(|&s| s > 0));
    }
}
