//! Random forest of CART-style classification trees.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;

const MIN_SPLIT_INFO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCriterion {
    Gini,
    InfoGain,
    GainRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub criterion: SplitCriterion,
    /// None grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features examined per node; None means ⌊√d⌋ (at least 1).
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            criterion: SplitCriterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
            bootstrap: true,
        }
    }
}

/// 1 − Σ p².
pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Shannon entropy in bits.
pub fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

fn weighted_child(f: fn(&[usize]) -> f64, left: &[usize], right: &[usize]) -> f64 {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = (nl + nr) as f64;
    (nl as f64 / n) * f(left) + (nr as f64 / n) * f(right)
}

pub fn gini_decrease(parent: &[usize], left: &[usize], right: &[usize]) -> f64 {
    gini(parent) - weighted_child(gini, left, right)
}

pub fn information_gain(parent: &[usize], left: &[usize], right: &[usize]) -> f64 {
    entropy(parent) - weighted_child(entropy, left, right)
}

/// Information gain over split information; None when the split
/// information is below 1e-12.
pub fn gain_ratio(parent: &[usize], left: &[usize], right: &[usize]) -> Option<f64> {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let split_info = entropy(&[nl, nr]);
    if split_info < MIN_SPLIT_INFO {
        return None;
    }
    Some(information_gain(parent, left, right) / split_info)
}

impl SplitCriterion {
    fn score(self, parent: &[usize], left: &[usize], right: &[usize]) -> Option<f64> {
        match self {
            SplitCriterion::Gini => Some(gini_decrease(parent, left, right)),
            SplitCriterion::InfoGain => Some(information_gain(parent, left, right)),
            SplitCriterion::GainRatio => gain_ratio(parent, left, right),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes are stored flat; index 0 is the root. Classes are indices into the
/// owning model's class universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn majority(counts: &[usize]) -> usize {
    // first maximum = smallest class on ties
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    n_candidates: usize,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Grower<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    fn best_split_on(&self, rows: &[usize], feature: usize, parent: &[usize]) -> Option<BestSplit> {
        let mut sorted: Vec<(f64, usize)> = rows.iter().map(|&r| (self.x[[r, feature]], self.y[r])).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut left = vec![0; self.n_classes];
        let mut right = parent.to_vec();
        let mut best: Option<BestSplit> = None;
        for i in 0..sorted.len() - 1 {
            let (v, c) = sorted[i];
            left[c] += 1;
            right[c] -= 1;
            let next = sorted[i + 1].0;
            if next <= v {
                continue;
            }
            let nl = i + 1;
            if nl < min_leaf || sorted.len() - nl < min_leaf {
                continue;
            }
            let Some(score) = self.params.criterion.score(parent, &left, &right) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(BestSplit {
                    feature,
                    threshold: v + (next - v) / 2.0,
                    score,
                });
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let counts = self.counts(&rows);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: majority(&counts),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || rows.len() < 2 * self.params.min_samples_leaf.max(1) {
            return id;
        }

        let mut features: Vec<usize> = (0..self.x.ncols()).collect();
        features.shuffle(rng);
        let mut best: Option<BestSplit> = None;
        for (i, &f) in features.iter().enumerate() {
            // past the sampled candidates, keep looking only until a valid split exists
            if i >= self.n_candidates && best.is_some() {
                break;
            }
            if let Some(s) = self.best_split_on(&rows, f, &counts) {
                if best.as_ref().is_none_or(|b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        let Some(split) = best else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&row| self.x[[row, split.feature]] <= split.threshold);
        let left = self.grow(l, depth + 1, rng);
        let right = self.grow(r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

pub fn fit_tree(
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    rows: Vec<usize>,
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let d = x.ncols();
    let n_candidates = params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
        .clamp(1, d.max(1));
    let mut g = Grower {
        x,
        y,
        n_classes,
        params,
        n_candidates,
        nodes: Vec::new(),
    };
    g.grow(rows, 0, rng);
    DecisionTree { nodes: g.nodes }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl Forest {
    /// Tree t uses RNG seed `seed + t`, so sequential and parallel fits agree.
    pub fn fit(
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
        exec: Execution,
    ) -> Forest {
        let n = x.nrows();
        let n_trees = params.n_trees.max(1);
        let trees = exec.map_range(n_trees, |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let rows = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree(x, y, n_classes, rows, params, &mut rng)
        });
        Forest { trees, n_classes }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut votes = vec![0; self.n_classes];
        for t in &self.trees {
            votes[t.predict_row(row)] += 1;
        }
        majority(&votes)
    }
}
