use interview_analytics::preprocess::*;
use ndarray::{Array2, Axis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

/// Largest r with p_(r) ≤ r·Q/m found by trying every r, then every column
/// whose p is at most p_(r).
fn bh_brute_force(p: &[f64], q: f64) -> Vec<usize> {
    let m = p.len();
    let mut sorted = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = None;
    for r in 1..=m {
        if sorted[r - 1] <= r as f64 * q / m as f64 {
            best = Some(sorted[r - 1]);
        }
    }
    match best {
        None => vec![],
        Some(cut) => (0..m).filter(|&i| p[i] <= cut).collect(),
    }
}

fn random_pvalues(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = rng.random_range(1..=20);
    (0..m)
        .map(|_| match rng.random_range(0..4) {
            0 => rng.random_range(0.0..0.01),
            1 => rng.random_range(0.0..0.06),
            2 => (rng.random_range(0..20) as f64) / 100.0,
            _ => rng.random::<f64>(),
        })
        .collect()
}

#[test]
fn bh_matches_brute_force_and_fwe_is_subset() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let p = random_pvalues(&mut rng);
        for q in [0.01, 0.05, 0.2] {
            let bh = select_fdr_bh(&p, q).unwrap().kept_columns;
            assert_eq!(bh, bh_brute_force(&p, q), "p={p:?} q={q}");
            let fwe = select_fwe(&p, q).unwrap().kept_columns;
            assert!(fwe.iter().all(|c| bh.contains(c)), "p={p:?}");
        }
    }
}

#[test]
fn selector_examples() {
    assert!(select_fdr_bh(&[1.0; 4], 0.05).unwrap().kept_columns.is_empty());
    assert_eq!(select_fdr_bh(&[0.01, 0.02, 0.03, 0.04, 0.05], 0.05).unwrap().kept_columns, vec![0, 1, 2, 3, 4]);
    assert_eq!(select_fdr_bh(&[0.001, 0.30, 0.40], 0.05).unwrap().kept_columns, vec![0]);
    assert!(select_fwe(&[1.0; 3], 0.05).unwrap().kept_columns.is_empty());
    assert_eq!(select_fwe(&[0.001, 0.04], 0.05).unwrap().kept_columns, vec![0]);
    assert_eq!(select_fwe(&[0.5, 0.3], 1.0).unwrap().kept_columns, vec![0, 1]);
    assert_eq!(select_k_best(&[0.9, 0.1, 0.5], 1).unwrap().kept_columns, vec![1]);
    assert_eq!(select_k_best(&[0.2, 0.2, 0.9], 1).unwrap().kept_columns, vec![0]);
    assert_eq!(select_k_best(&[0.2, 0.2, 0.9], 3).unwrap().kept_columns, vec![0, 1, 2]);
    assert!(select_k_best(&[0.2], 2).is_err());
}

fn max_offdiag(x: &Array2<f64>, cols: &[usize]) -> f64 {
    let sub = x.select(Axis(1), cols);
    let c = correlation_matrix(sub.view());
    let mut worst: f64 = 0.0;
    for i in 0..cols.len() {
        for j in 0..cols.len() {
            if i != j {
                worst = worst.max(c[i][j].abs());
            }
        }
    }
    worst
}

/// Direct Pearson from the textbook formula.
fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

#[test]
fn prune_output_respects_threshold_on_random_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(5..30);
        let d = rng.random_range(2..12);
        let mut x = Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0));
        for j in 1..d {
            if rng.random_bool(0.4) {
                let src = rng.random_range(0..j);
                let mix = rng.random_range(0.3..1.0);
                for i in 0..n {
                    x[[i, j]] = mix * x[[i, src]] + (1.0 - mix) * x[[i, j]];
                }
            }
        }
        let kept = correlation_prune(x.view(), 0.6).unwrap().kept_columns;
        assert!(max_offdiag(&x, &kept) <= 0.6);
        for j in 0..d {
            if !kept.contains(&j) {
                let cj = x.column(j).to_vec();
                assert!(kept
                    .iter()
                    .filter(|&&i| i < j)
                    .any(|&i| pearson_oracle(&x.column(i).to_vec(), &cj).abs() > 0.6));
            }
        }
    }
}

#[test]
fn prune_examples() {
    let a = [1.0, 2.0, 4.0, 3.0, 0.0];
    let dup = Array2::from_shape_fn((5, 2), |(i, _)| a[i]);
    assert_eq!(correlation_prune(dup.view(), 0.6).unwrap().kept_columns, vec![0]);
    let tri = Array2::from_shape_fn((5, 3), |(i, j)| a[i] + [0.0, 1e-3, -1e-3][j] * i as f64);
    assert_eq!(correlation_prune(tri.view(), 0.6).unwrap().kept_columns, vec![0]);
    // centred Walsh columns are mutually uncorrelated
    let ortho = ndarray::array![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    assert!(max_offdiag(&ortho, &[0, 1, 2]) <= 1e-12);
    assert_eq!(correlation_prune(ortho.view(), 0.6).unwrap().kept_columns, vec![0, 1, 2]);
}

/// Sums-of-squares ANOVA followed by the statrs F distribution.
fn anova_oracle(x: &[f64], y: &[u8]) -> f64 {
    let n = x.len() as f64;
    let grand = x.iter().sum::<f64>() / n;
    let mut classes: Vec<u8> = y.to_vec();
    classes.sort();
    classes.dedup();
    let g = classes.len() as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for c in classes {
        let v: Vec<f64> = x.iter().zip(y).filter(|(_, &k)| k == c).map(|(a, _)| *a).collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        ssb += v.len() as f64 * (m - grand).powi(2);
        ssw += v.iter().map(|a| (a - m).powi(2)).sum::<f64>();
    }
    let f = (ssb / (g - 1.0)) / (ssw / (n - g));
    1.0 - FisherSnedecor::new(g - 1.0, n - g).unwrap().cdf(f)
}

#[test]
fn anova_matches_textbook_oracle() {
    let y: Vec<u8> = vec![1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3];
    let x = [2.1, 2.5, 1.9, 2.4, 3.0, 3.3, 2.8, 3.6, 2.2, 2.9, 2.6, 3.1];
    let got = one_way_anova(&x, &y).p;
    assert!((got - anova_oracle(&x, &y)).abs() <= 1e-9, "{got}");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let xs: Vec<f64> = (0..12).map(|i| y[i] as f64 * 0.3 + rng.random_range(-1.0..1.0)).collect();
        assert!((one_way_anova(&xs, &y).p - anova_oracle(&xs, &y)).abs() <= 1e-9);
    }
    assert_eq!(one_way_anova(&[3.0; 12], &y).p, 1.0);
    let exact: Vec<f64> = y.iter().map(|&c| c as f64).collect();
    assert!(one_way_anova(&exact, &y).p <= 1e-12);
    let single = Array2::from_elem((4, 1), 1.0);
    assert!(f_test_pvalues(single.view(), &[2, 2, 2, 2]).is_err());
}

#[test]
fn standardization_examples() {
    let x = ndarray::array![[3.0, 7.0], [5.0, 7.0]];
    let st = StandardizerState::fit(x.view()).unwrap();
    assert_eq!((st.mean[0], st.std[0]), (4.0, 1.0));
    assert_eq!((st.mean[1], st.std[1], st.flagged[1]), (7.0, 0.0, true));
    let spot = StandardizerState { mean: vec![3.0], std: vec![2.0], flagged: vec![false] };
    assert_eq!(spot.transform_row(&[5.0]).unwrap(), vec![1.0]);
    assert_eq!(st.transform_row(&[4.0, 7.0]).unwrap(), vec![0.0, 0.0]);
    assert!(StandardizerState::fit(ndarray::array![[1.0]].view()).is_err());
}

#[test]
fn standardization_on_50_random_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let n = rng.random_range(2..60);
        let d = rng.random_range(1..8);
        let scale = 10f64.powi(rng.random_range(-3..4));
        let x = Array2::from_shape_fn((n, d), |(_, j)| {
            if j == 0 && d > 2 { 42.0 } else { rng.random_range(-1.0..1.0) * scale + 5.0 }
        });
        let st = StandardizerState::fit(x.view()).unwrap();
        let z = st.transform(x.view()).unwrap();
        for j in 0..d {
            let col = z.column(j);
            let mean = col.sum() / n as f64;
            assert!(mean.abs() <= 1e-12, "mean {mean}");
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
            if st.flagged[j] {
                assert!(col.iter().all(|&v| v == 0.0));
            } else {
                assert!((sd - 1.0).abs() <= 1e-9, "sd {sd}");
            }
        }
    }
}

proptest! {
    #[test]
    fn selection_is_idempotent(p in prop::collection::vec(0.0f64..1.0, 1..20), q in 0.01f64..0.5) {
        let first = select_fdr_bh(&p, q).unwrap().kept_columns;
        let sub: Vec<f64> = first.iter().map(|&i| p[i]).collect();
        if !sub.is_empty() {
            let again = select_fdr_bh(&sub, q).unwrap().kept_columns;
            prop_assert_eq!(again.len(), sub.len());
        }
        let d = p.len();
        prop_assert_eq!(select_k_best(&p, d).unwrap().kept_columns, (0..d).collect::<Vec<_>>());
        let fwe = select_fwe(&p, q).unwrap().kept_columns;
        let sub: Vec<f64> = fwe.iter().map(|&i| p[i]).collect();
        if !sub.is_empty() {
            prop_assert_eq!(select_fwe(&sub, q).unwrap().kept_columns.len(), sub.len());
        }
    }

    #[test]
    fn f_survival_matches_statrs(f in 0.0f64..30.0, d1 in 1u32..10, d2 in 1u32..60) {
        let want = 1.0 - FisherSnedecor::new(d1 as f64, d2 as f64).unwrap().cdf(f);
        prop_assert!((f_survival(f, d1 as f64, d2 as f64) - want).abs() <= 1e-10);
    }
}
