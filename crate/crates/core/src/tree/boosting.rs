//! Multiclass gradient boosting with regression-tree base learners.
//!
//! Scores start at the log weighted class priors. Each stage fits, for every
//! present class, a squared-error regression tree to the residual
//! `onehot − softmax(F)` and sets each leaf to a one-step Newton estimate
//!
//! ```text
//! γ = (K − 1) / K · Σ w r / Σ w |r| (1 − |r|)
//! ```
//!
//! where `K` is the number of present classes. Scores move by
//! `learning_rate · γ`. Absent classes keep probability zero.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::binned::{grow_binned, Binned};
use super::builder::{grow, route, GrowParams, Node, Presorted, SquaredError};
use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::masked_softmax;

/// Largest per-feature distinct-value count for histogram split search.
const MAX_BINS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            n_stages: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_split: 2,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::validation("BOOST: learning_rate must lie in (0, 1]"));
        }
        if self.max_depth == 0 || self.min_samples_split < 2 {
            return Err(Error::validation(
                "BOOST: max_depth ≥ 1 and min_samples_split ≥ 2 required",
            ));
        }
        Ok(())
    }
}

/// A regression tree whose leaves hold a score increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node<f64>>,
    pub impurity_decrease: Vec<f64>,
    pub root_weight: f64,
}

impl RegressionTree {
    pub fn predict_row(&self, x: ArrayView1<'_, f64>) -> f64 {
        *route(&self.nodes, |f| x[f])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub initial_scores: [f64; N_CLASSES],
    pub present: [bool; N_CLASSES],
    pub learning_rate: f64,
    /// `stages[m]` holds one tree per present class, in class order.
    pub stages: Vec<Vec<(usize, RegressionTree)>>,
    /// Weighted mean multinomial deviance after each stage.
    pub deviance: Vec<f64>,
}

fn deviance(scores: &[[f64; N_CLASSES]], labels: &[usize], weights: &[f64], present: &[bool; N_CLASSES]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for ((s, &y), w) in scores.iter().zip(labels).zip(weights) {
        let mut p = *s;
        masked_softmax(&mut p, present);
        acc -= w * p[y].max(f64::MIN_POSITIVE).ln();
    }
    2.0 * acc / total
}

pub fn fit_gradient_boosting(data: &EncodedDataset, config: &BoostConfig) -> Result<BoostedModel> {
    config.validate()?;
    let present = data.present_classes();
    let k = present.iter().filter(|p| **p).count();
    if k < 2 {
        return Err(Error::validation(
            "BOOST needs at least two classes in the training data",
        ));
    }
    let class_w = data.class_weights();
    let total = data.total_weight();
    let mut initial_scores = [0.0; N_CLASSES];
    for c in 0..N_CLASSES {
        if present[c] {
            initial_scores[c] = (class_w[c] / total).ln();
        }
    }

    let n = data.n_samples();
    let labels = data.labels();
    let weights = data.weights();
    // Histogram search when features have few distinct values, presorted otherwise.
    let binned = Binned::new(data.features(), MAX_BINS);
    let pre = binned.is_none().then(|| Presorted::new(data.features()));
    let params = GrowParams {
        max_depth: Some(config.max_depth),
        min_samples_split: config.min_samples_split,
        mtry: None,
    };
    let newton_scale = (k as f64 - 1.0) / k as f64;

    let mut scores = vec![initial_scores; n];
    let mut residual = vec![0.0; n];
    let mut stages = Vec::with_capacity(config.n_stages);
    let mut history = Vec::with_capacity(config.n_stages);

    for stage in 0..config.n_stages {
        let probs: Vec<[f64; N_CLASSES]> = scores
            .iter()
            .map(|s| {
                let mut p = *s;
                masked_softmax(&mut p, &present);
                p
            })
            .collect();
        let mut trees = Vec::with_capacity(k);
        for c in (0..N_CLASSES).filter(|&c| present[c]) {
            for i in 0..n {
                residual[i] = f64::from(u8::from(labels[i] == c)) - probs[i][c];
            }
            let newton = |rows: &[u32]| {
                let (mut num, mut den) = (0.0, 0.0);
                for &r in rows {
                    let (w, r) = (weights[r as usize], residual[r as usize]);
                    num += w * r;
                    den += w * r.abs() * (1.0 - r.abs());
                }
                if den <= 1e-150 {
                    0.0
                } else {
                    newton_scale * num / den
                }
            };
            let grown = match (&binned, &pre) {
                (Some(b), _) => grow_binned(
                    b,
                    weights,
                    &residual,
                    params.max_depth,
                    params.min_samples_split,
                    newton,
                ),
                (None, Some(pre)) => {
                    let criterion = SquaredError {
                        targets: &residual,
                        weights,
                    };
                    grow(pre, weights, &criterion, params, None, |_, rows: &[u32]| newton(rows))
                }
                (None, None) => unreachable!("one split index is always built"),
            };
            let tree = RegressionTree {
                nodes: grown.nodes,
                impurity_decrease: grown.impurity_decrease,
                root_weight: grown.root_weight,
            };
            for (i, s) in scores.iter_mut().enumerate() {
                s[c] += config.learning_rate * tree.predict_row(data.row(i));
                if !s[c].is_finite() {
                    return Err(Error::Numerical {
                        stage: "boosting stage",
                        index: stage,
                        message: format!("non-finite score for class {c} at row {i}"),
                    });
                }
            }
            trees.push((c, tree));
        }
        stages.push(trees);
        history.push(deviance(&scores, labels, weights, &present));
    }

    Ok(BoostedModel {
        initial_scores,
        present,
        learning_rate: config.learning_rate,
        stages,
        deviance: history,
    })
}

impl BoostedModel {
    pub fn scores(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut s = self.initial_scores;
        for stage in &self.stages {
            for (c, tree) in stage {
                s[*c] += self.learning_rate * tree.predict_row(x);
            }
        }
        s
    }

    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut s = self.scores(x);
        masked_softmax(&mut s, &self.present);
        s
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        crate::linear::rows_to_proba(x, |row| self.predict_proba_row(row))
    }

    pub fn trees(&self) -> impl Iterator<Item = &RegressionTree> {
        self.stages.iter().flatten().map(|(_, t)| t)
    }
}
