//! Greedy binary tree growth over presorted feature columns.
//!
//! Every feature keeps the node's rows sorted by value, so a split search is
//! one linear scan per candidate feature. After a split the per-feature
//! orders are stably partitioned in place, left rows first.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::N_CLASSES;

/// Splits whose impurity decrease does not exceed this are not taken.
pub const MIN_DECREASE: f64 = 1e-12;
/// Candidate decreases within this of the incumbent count as ties.
pub const TIE_EPS: f64 = 1e-12;

/// Sufficient statistics of a set of rows for one impurity measure.
pub(crate) trait Criterion {
    type Stats: Clone;

    fn zero(&self) -> Self::Stats;
    fn add(&self, stats: &mut Self::Stats, row: usize);
    fn minus(&self, total: &Self::Stats, part: &Self::Stats) -> Self::Stats;
    fn weight(&self, stats: &Self::Stats) -> f64;
    fn impurity(&self, stats: &Self::Stats) -> f64;
    /// `impurity(parent) − (w_l/w)·impurity(left) − (w_r/w)·impurity(right)`.
    fn decrease(&self, parent: &Self::Stats, left: &Self::Stats, right: &Self::Stats) -> f64;
}

/// Weighted Gini impurity over class labels.
pub(crate) struct Gini<'a> {
    pub labels: &'a [usize],
    pub weights: &'a [f64],
}

pub(crate) fn gini(counts: &[f64; N_CLASSES]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total).powi(2)).sum::<f64>()
}

impl Criterion for Gini<'_> {
    type Stats = [f64; N_CLASSES];

    fn zero(&self) -> Self::Stats {
        [0.0; N_CLASSES]
    }

    fn add(&self, stats: &mut Self::Stats, row: usize) {
        stats[self.labels[row]] += self.weights[row];
    }

    fn minus(&self, total: &Self::Stats, part: &Self::Stats) -> Self::Stats {
        std::array::from_fn(|c| (total[c] - part[c]).max(0.0))
    }

    fn weight(&self, stats: &Self::Stats) -> f64 {
        stats.iter().sum()
    }

    fn impurity(&self, stats: &Self::Stats) -> f64 {
        gini(stats)
    }

    fn decrease(&self, parent: &Self::Stats, left: &Self::Stats, right: &Self::Stats) -> f64 {
        let (w, wl, wr) = (self.weight(parent), self.weight(left), self.weight(right));
        gini(parent) - wl / w * gini(left) - wr / w * gini(right)
    }
}

/// Weighted squared error around the node mean.
pub(crate) struct SquaredError<'a> {
    pub targets: &'a [f64],
    pub weights: &'a [f64],
}

impl Criterion for SquaredError<'_> {
    /// (Σw, Σw·y, Σw·y²)
    type Stats = [f64; 3];

    fn zero(&self) -> Self::Stats {
        [0.0; 3]
    }

    fn add(&self, stats: &mut Self::Stats, row: usize) {
        let (w, y) = (self.weights[row], self.targets[row]);
        stats[0] += w;
        stats[1] += w * y;
        stats[2] += w * y * y;
    }

    fn minus(&self, total: &Self::Stats, part: &Self::Stats) -> Self::Stats {
        [total[0] - part[0], total[1] - part[1], total[2] - part[2]]
    }

    fn weight(&self, stats: &Self::Stats) -> f64 {
        stats[0]
    }

    fn impurity(&self, s: &Self::Stats) -> f64 {
        if s[0] <= 0.0 {
            return 0.0;
        }
        let mean = s[1] / s[0];
        (s[2] / s[0] - mean * mean).max(0.0)
    }

    fn decrease(&self, parent: &Self::Stats, left: &Self::Stats, right: &Self::Stats) -> f64 {
        // Equal to the variance reduction, without cancellation.
        let (w, wl, wr) = (parent[0], left[0], right[0]);
        if wl <= 0.0 || wr <= 0.0 {
            return 0.0;
        }
        let diff = left[1] / wl - right[1] / wr;
        wl * wr / (w * w) * diff * diff
    }
}

/// Best threshold on one feature given the node's rows sorted by that feature.
/// Returns (threshold, decrease, number of rows routed left).
pub(crate) fn scan_feature<C: Criterion>(
    criterion: &C,
    sorted_rows: &[u32],
    column: &[f64],
    total: &C::Stats,
) -> Option<(f64, f64, usize)> {
    let mut left = criterion.zero();
    let mut best: Option<(f64, f64, usize)> = None;
    for k in 0..sorted_rows.len().saturating_sub(1) {
        let row = sorted_rows[k] as usize;
        criterion.add(&mut left, row);
        let (a, b) = (column[row], column[sorted_rows[k + 1] as usize]);
        if b <= a {
            continue;
        }
        let right = criterion.minus(total, &left);
        let dec = criterion.decrease(total, &left, &right);
        if best.is_none_or(|(_, d, _)| dec > d + TIE_EPS) {
            let mut thr = 0.5 * (a + b);
            if thr >= b {
                thr = a;
            }
            best = Some((thr, dec, k + 1));
        }
    }
    best
}

/// A node of a fitted tree. Internal nodes route `x[feature] ≤ threshold` left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node<L> {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(L),
}

/// Evaluates the tree at `x`, returning the leaf payload.
pub(crate) fn route<L>(nodes: &[Node<L>], x: impl Fn(usize) -> f64) -> &L {
    let mut i = 0;
    loop {
        match &nodes[i] {
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => i = if x(*feature) <= *threshold { *left } else { *right },
            Node::Leaf(l) => return l,
        }
    }
}

/// Feature columns plus every feature's row order, computed once per fit.
pub(crate) struct Presorted {
    pub columns: Vec<Vec<f64>>,
    pub order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(x: ArrayView2<'_, f64>) -> Self {
        let columns: Vec<Vec<f64>> = x.columns().into_iter().map(|c| c.to_vec()).collect();
        let order = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Presorted { columns, order }
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features drawn per node; `None` means all of them.
    pub mtry: Option<usize>,
}

pub(crate) struct Grown<L> {
    pub nodes: Vec<Node<L>>,
    /// Per feature: Σ over splits of node weight × impurity decrease.
    pub impurity_decrease: Vec<f64>,
    pub root_weight: f64,
}

/// Grows one tree on the rows with positive entries in `row_weight`.
///
/// `leaf` builds the leaf payload from the node statistics and its rows.
pub(crate) fn grow<C, L, F>(
    pre: &Presorted,
    row_weight: &[f64],
    criterion: &C,
    params: GrowParams,
    mut rng: Option<&mut ChaCha8Rng>,
    mut leaf: F,
) -> Grown<L>
where
    C: Criterion,
    F: FnMut(&C::Stats, &[u32]) -> L,
{
    let d = pre.n_features();
    let mut order: Vec<Vec<u32>> = pre
        .order
        .iter()
        .map(|o| o.iter().copied().filter(|&i| row_weight[i as usize] > 0.0).collect())
        .collect();
    let n = order.first().map_or(0, Vec::len);
    let mut go_left = vec![false; row_weight.len()];
    let mut scratch: Vec<u32> = Vec::with_capacity(n);
    let mut importance = vec![0.0; d];
    let mut nodes: Vec<Node<L>> = Vec::new();
    let all_features: Vec<usize> = (0..d).collect();

    // (node slot, start, end, depth)
    let mut stack = vec![(0usize, 0usize, n, 0usize)];
    nodes.push(Node::Split {
        feature: usize::MAX,
        threshold: f64::NAN,
        left: 0,
        right: 0,
    });
    let mut root_weight = 0.0;

    while let Some((slot, start, end, depth)) = stack.pop() {
        let mut total = criterion.zero();
        for &r in &order[0][start..end] {
            criterion.add(&mut total, r as usize);
        }
        if slot == 0 {
            root_weight = criterion.weight(&total);
        }

        let can_split = end - start >= params.min_samples_split.max(2)
            && params.max_depth.is_none_or(|m| depth < m)
            && criterion.impurity(&total) > 0.0;

        let mut best: Option<(usize, f64, f64, usize)> = None;
        if can_split {
            let drawn;
            let candidates: &[usize] = match (params.mtry, rng.as_deref_mut()) {
                (Some(m), Some(r)) if m < d => {
                    let mut f = sample(r, d, m).into_vec();
                    f.sort_unstable();
                    drawn = f;
                    &drawn
                }
                _ => &all_features,
            };
            for &f in candidates {
                if let Some((thr, dec, n_left)) =
                    scan_feature(criterion, &order[f][start..end], &pre.columns[f], &total)
                {
                    if best.is_none_or(|(_, _, bd, _)| dec > bd + TIE_EPS) {
                        best = Some((f, thr, dec, n_left));
                    }
                }
            }
        }

        match best {
            Some((feature, threshold, dec, n_left)) if dec > MIN_DECREASE => {
                importance[feature] += criterion.weight(&total) * dec;
                for &r in &order[feature][start..start + n_left] {
                    go_left[r as usize] = true;
                }
                for (g, ord) in order.iter_mut().enumerate() {
                    if g == feature {
                        continue;
                    }
                    scratch.clear();
                    let seg = &mut ord[start..end];
                    let mut write = 0;
                    for k in 0..seg.len() {
                        let r = seg[k];
                        if go_left[r as usize] {
                            seg[write] = r;
                            write += 1;
                        } else {
                            scratch.push(r);
                        }
                    }
                    seg[write..].copy_from_slice(&scratch);
                }
                for &r in &order[feature][start..start + n_left] {
                    go_left[r as usize] = false;
                }
                let left = nodes.len();
                let right = left + 1;
                let placeholder = || Node::Split {
                    feature: usize::MAX,
                    threshold: f64::NAN,
                    left: 0,
                    right: 0,
                };
                nodes.push(placeholder());
                nodes.push(placeholder());
                nodes[slot] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                let mid = start + n_left;
                stack.push((right, mid, end, depth + 1));
                stack.push((left, start, mid, depth + 1));
            }
            _ => {
                nodes[slot] = Node::Leaf(leaf(&total, &order[0][start..end]));
            }
        }
    }

    Grown {
        nodes,
        impurity_decrease: importance,
        root_weight,
    }
}
