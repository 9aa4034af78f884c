mod common;

use common::{nearest_centroid_loo, LeakageProbe};
use interview_analytics::classifiers::{grid_search, ForestParams, Hyperparams, ModelFamily, ModelSpec};
use interview_analytics::eval::*;
use interview_analytics::exec::Execution;
use interview_analytics::model::{LabelName, Modality, ModalityMask};
use interview_analytics::preprocess::SelectorSpec;
use interview_analytics::synthetic::planted_signal_corpus;
use proptest::prelude::*;

fn per_class_counts(plan: &FoldPlan, y: &[u8], class: u8) -> Vec<usize> {
    (0..plan.k)
        .map(|f| plan.test_indices(f).iter().filter(|&&i| y[i] == class).count())
        .collect()
}

#[test]
fn fold_examples() {
    let plan = stratified_kfold(&[1u8, 1, 1, 2, 2, 2], 3, 0).unwrap();
    let y = [1u8, 1, 1, 2, 2, 2];
    for c in [1, 2] {
        assert_eq!(per_class_counts(&plan, &y, c), vec![1, 1, 1]);
    }
    let distinct = stratified_kfold(&[1u8, 2, 3], 3, 5).unwrap();
    assert_eq!(distinct.fold_sizes(), vec![1, 1, 1]);

    let mut y28 = vec![1u8; 10];
    y28.extend([2u8; 9]);
    y28.extend([3u8; 9]);
    let a = stratified_kfold(&y28, 3, 42).unwrap();
    for c in [1, 2, 3] {
        let counts = per_class_counts(&a, &y28, c);
        assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1, "{counts:?}");
    }
    assert_eq!(a, stratified_kfold(&y28, 3, 42).unwrap());
    assert!(stratified_kfold(&[1u8, 2], 3, 0).is_err());
}

#[test]
fn group_folds_keep_candidates_together() {
    let groups: Vec<Option<String>> = (0..12).map(|i| Some(format!("c{}", i / 2))).chain([None, None]).collect();
    let plan = group_kfold(&groups, 3, 1).unwrap();
    for i in (0..12).step_by(2) {
        assert_eq!(plan.assignments[i], plan.assignments[i + 1]);
    }
    assert!(plan.fold_sizes().iter().all(|&s| s > 0));
}

#[test]
fn metric_examples() {
    assert_eq!(accuracy(&[1u8, 2, 3], &[1, 2, 4]).unwrap(), 2.0 / 3.0);
    assert!(accuracy::<u8>(&[], &[]).is_err());
    assert!(accuracy(&[1u8], &[1, 2]).is_err());
    let m = confusion_matrix(&[1, 1, 7], &[1, 2, 7]);
    assert_eq!((m[0][0], m[1][0], m[6][6]), (1, 1, 1));
}

#[test]
fn rf_grid_table_shape_and_order() {
    let corpus = planted_signal_corpus(42, 3, 0.15).unwrap();
    let x = corpus.dataset.fused(ModalityMask::single(Modality::Audio)).unwrap();
    let y = corpus.dataset.label(LabelName::EyeContact).unwrap();
    let grid: Vec<ModelSpec> = [10, 100]
        .iter()
        .map(|&n| ModelSpec {
            hyperparams: Hyperparams::RandomForest(ForestParams { n_trees: n, ..Default::default() }),
            seed: 1,
        })
        .collect();
    let res = grid_search(&grid, x.values().view(), y, 3, 1, Execution::Parallel).unwrap();
    assert_eq!(res.table.len(), 2);
    assert!(res.table.iter().all(|p| p.fold_accuracies.len() == 3));
    let best = res.table[res.best_index].mean_accuracy;
    assert_eq!(res.best(), &res.table[res.best_index].spec);
    assert!(res.table.iter().all(|p| best >= p.mean_accuracy));
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        modalities: vec![ModalityMask::ALL, ModalityMask::single(Modality::Audio)],
        selectors: vec![SelectorSpec::FdrBh { q: 0.05 }],
        models: vec![ModelFamily::RandomForest],
        grids: [(
            ModelFamily::RandomForest,
            vec![Hyperparams::RandomForest(ForestParams { n_trees: 30, ..Default::default() })],
        )]
        .into(),
        ..Default::default()
    }
}

#[test]
fn cell_count_and_single_cell() {
    assert_eq!(ExperimentConfig::default().n_cells(), 9 * 7 * 3 * 4);
    let corpus = planted_signal_corpus(30, 4, 0.15).unwrap();
    let config = ExperimentConfig {
        labels: vec![LabelName::Calmness],
        modalities: vec![ModalityMask::ALL],
        ..small_config()
    };
    assert_eq!(config.n_cells(), 1);
    let r = run_experiment_matrix(&corpus.dataset, &config, Execution::Parallel, &NoMatrixObserver).unwrap();
    assert_eq!(r.len(), 1);
    let mean = r[0].fold_accuracies.iter().sum::<f64>() / 3.0;
    assert!((r[0].mean_accuracy - mean).abs() <= 1e-12);
    assert!(r[0].fold_accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
}

#[test]
fn planted_signal_small_matrix_without_leakage() {
    let corpus = planted_signal_corpus(60, 7, 0.15).unwrap();
    let config = small_config();
    let probe = LeakageProbe::new(&corpus.dataset, &config);
    let results = run_experiment_matrix(&corpus.dataset, &config, Execution::Parallel, &probe).unwrap();
    assert_eq!(results.len(), 18);
    assert!(probe.leaks.lock().unwrap().is_empty(), "{:?}", probe.leaks.lock().unwrap());
    assert_eq!(*probe.events.lock().unwrap(), 18 * 3 * 3);
    for &label in &LabelName::ALL {
        assert!(nearest_centroid_loo(&corpus.dataset, label, &corpus.planted[&label]) >= 0.95);
        let best = results
            .iter()
            .filter(|r| r.label_name == label)
            .map(|r| r.mean_accuracy)
            .fold(0.0, f64::max);
        assert!(best >= 0.90, "{label}: {best}");
    }
    let shapes: Vec<_> = render_tables(&results).iter().map(|t| t.shape()).collect();
    assert_eq!(shapes, vec![(9, 4), (9, 4), (9, 3), (9, 3)]);
}

#[test]
fn matrix_is_deterministic_and_execution_independent() {
    let corpus = planted_signal_corpus(30, 8, 0.3).unwrap();
    let config = ExperimentConfig { labels: vec![LabelName::Focused, LabelName::Pauses], ..small_config() };
    let a = run_experiment_matrix(&corpus.dataset, &config, Execution::Parallel, &NoMatrixObserver).unwrap();
    let b = run_experiment_matrix(&corpus.dataset, &config, Execution::Sequential, &NoMatrixObserver).unwrap();
    assert_eq!(results_csv(&a), results_csv(&b));
    let ma = RunManifest::new(&config, 30, &a).unwrap().to_json().unwrap();
    let mb = RunManifest::new(&config, 30, &b).unwrap().to_json().unwrap();
    assert_eq!(ma, mb);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn stratified_folds_are_balanced(y in prop::collection::vec(1u8..=7, 6..60), seed in 0u64..1000) {
        let plan = stratified_kfold(&y, 3, seed).unwrap();
        prop_assert!(plan.fold_sizes().iter().all(|&s| s > 0));
        for c in 1..=7u8 {
            let size = y.iter().filter(|&&v| v == c).count();
            if size >= 3 {
                let counts = per_class_counts(&plan, &y, c);
                prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
            }
        }
        let mut all: Vec<usize> = (0..3).flat_map(|f| plan.test_indices(f)).collect();
        all.sort();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
    }
}
