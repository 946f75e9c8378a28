//! CART classification trees grown on weighted Gini impurity.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::builder::{grow, route, scan_feature, Criterion, Gini, GrowParams, Node, Presorted, TIE_EPS};
use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::normalize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartConfig {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for CartConfig {
    fn default() -> Self {
        CartConfig {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

impl CartConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::validation("CART: min_samples_split must be ≥ 2"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::validation("CART: max_depth must be ≥ 1"));
        }
        Ok(())
    }
}

/// A fitted classification tree. Leaves hold weighted class counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTree {
    pub nodes: Vec<Node<[f64; N_CLASSES]>>,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Per feature: Σ node weight × Gini decrease over this tree's splits.
    pub impurity_decrease: Vec<f64>,
    pub root_weight: f64,
}

/// Result of a split search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gini_decrease: f64,
}

/// Best weighted-Gini split of `rows` over `candidate_features`.
///
/// Thresholds are midpoints between consecutive distinct values. Ties go to
/// the lowest feature index, then the smallest threshold. Returns `None` when
/// the node is pure or no candidate feature takes two distinct values.
pub fn best_split(data: &EncodedDataset, rows: &[usize], candidate_features: &[usize]) -> Option<Split> {
    let labels = data.labels();
    let weights = data.weights();
    let criterion = Gini { labels, weights };
    let mut total = criterion.zero();
    for &r in rows {
        criterion.add(&mut total, r);
    }
    if criterion.impurity(&total) <= 0.0 {
        return None;
    }
    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();
    let mut best: Option<Split> = None;
    for f in features {
        let column: Vec<f64> = data.features().column(f).to_vec();
        let mut sorted: Vec<u32> = rows.iter().map(|&r| r as u32).collect();
        sorted.sort_by(|&a, &b| column[a as usize].total_cmp(&column[b as usize]).then(a.cmp(&b)));
        if let Some((threshold, dec, _)) = scan_feature(&criterion, &sorted, &column, &total) {
            if best.is_none_or(|b| dec > b.gini_decrease + TIE_EPS) {
                best = Some(Split {
                    feature: f,
                    threshold,
                    gini_decrease: dec,
                });
            }
        }
    }
    best
}

pub fn fit_cart(data: &EncodedDataset, config: &CartConfig) -> Result<ClassificationTree> {
    config.validate()?;
    let pre = Presorted::new(data.features());
    Ok(grow_classifier(
        &pre,
        data.labels(),
        data.weights(),
        GrowParams {
            max_depth: config.max_depth,
            min_samples_split: config.min_samples_split,
            mtry: None,
        },
        None,
    ))
}

/// Grows a Gini tree on rows with positive `row_weight`.
pub(crate) fn grow_classifier(
    pre: &Presorted,
    labels: &[usize],
    row_weight: &[f64],
    params: GrowParams,
    rng: Option<&mut ChaCha8Rng>,
) -> ClassificationTree {
    let criterion = Gini {
        labels,
        weights: row_weight,
    };
    let grown = grow(pre, row_weight, &criterion, params, rng, |counts, _| *counts);
    ClassificationTree {
        nodes: grown.nodes,
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        impurity_decrease: grown.impurity_decrease,
        root_weight: grown.root_weight,
    }
}

impl ClassificationTree {
    pub fn leaf_counts(&self, x: ArrayView1<'_, f64>) -> &[f64; N_CLASSES] {
        route(&self.nodes, |f| x[f])
    }

    /// Weighted class fractions of the leaf `x` falls in.
    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        normalize(self.leaf_counts(x))
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        crate::linear::rows_to_proba(x, |row| self.predict_proba_row(row))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node<[f64; N_CLASSES]>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }
}
