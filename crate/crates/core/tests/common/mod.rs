#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use interview_analytics::eval::{fold_plan, Dataset, ExperimentConfig, FitEvent, MatrixObserver};
use interview_analytics::model::LabelName;
use interview_analytics::pipeline::FitStage;

/// Records every preprocessing fit that saw a row from its own test fold.
pub struct LeakageProbe {
    test_rows: BTreeMap<(LabelName, usize), BTreeSet<String>>,
    pub events: Mutex<usize>,
    pub leaks: Mutex<Vec<String>>,
}

impl LeakageProbe {
    pub fn new(dataset: &Dataset, config: &ExperimentConfig) -> LeakageProbe {
        let mut test_rows = BTreeMap::new();
        for &label in &config.labels {
            let plan = fold_plan(dataset, config, label).unwrap();
            for fold in 0..plan.k {
                let ids = plan.test_indices(fold).iter().map(|&i| dataset.row_ids()[i].clone()).collect();
                test_rows.insert((label, fold), ids);
            }
        }
        LeakageProbe { test_rows, events: Mutex::new(0), leaks: Mutex::new(Vec::new()) }
    }
}

impl MatrixObserver for LeakageProbe {
    fn fitted(&self, e: FitEvent<'_>) {
        if !matches!(e.stage, FitStage::Standardizer | FitStage::Pruner | FitStage::Selector) {
            return;
        }
        *self.events.lock().unwrap() += 1;
        let test = &self.test_rows[&(e.label, e.fold)];
        for id in e.row_ids {
            if test.contains(id) {
                self.leaks.lock().unwrap().push(format!(
                    "{} {} {} {} fold {} {:?} read {id}",
                    e.label,
                    e.mask,
                    e.selector.short_name(),
                    e.family,
                    e.fold,
                    e.stage
                ));
            }
        }
    }
}

/// Leave-one-out nearest-centroid accuracy on the planted columns of `label`.
pub fn nearest_centroid_loo(dataset: &Dataset, label: LabelName, planted: &[String]) -> f64 {
    use interview_analytics::model::{Modality, ModalityMask};
    let x = dataset.fused(ModalityMask::single(Modality::Audio)).unwrap();
    let names = x.column_names();
    let cols: Vec<usize> = planted.iter().map(|p| names.iter().position(|n| n == p).unwrap()).collect();
    let y = dataset.label(label).unwrap();
    let v = x.values();
    let n = y.len();
    let mut correct = 0;
    for i in 0..n {
        let mut best = (f64::INFINITY, 0u8);
        for c in 1..=7u8 {
            let members: Vec<usize> = (0..n).filter(|&r| r != i && y[r] == c).collect();
            if members.is_empty() {
                continue;
            }
            let d: f64 = cols
                .iter()
                .map(|&j| {
                    let m = members.iter().map(|&r| v[[r, j]]).sum::<f64>() / members.len() as f64;
                    (v[[i, j]] - m).powi(2)
                })
                .sum();
            if d < best.0 {
                best = (d, c);
            }
        }
        correct += (best.1 == y[i]) as usize;
    }
    correct as f64 / n as f64
}
