//! Random forests and bagged trees.
//!
//! Both train full-depth Gini trees on bootstrap resamples and average the
//! trees' leaf class fractions. A random forest draws `mtry` candidate
//! features at every node; bagging considers all of them.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::builder::{GrowParams, Presorted};
use super::cart::{grow_classifier, ClassificationTree};
use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::rng;

/// How bootstrap resamples treat sample weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapMode {
    /// Draw rows with probability proportional to weight; each draw counts once.
    Weighted,
    /// Draw rows uniformly; each draw carries the row's weight.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub mtry: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub bootstrap: bool,
    pub bootstrap_mode: BootstrapMode,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 10,
            mtry: 2,
            max_depth: None,
            min_samples_split: 2,
            bootstrap: true,
            bootstrap_mode: BootstrapMode::Weighted,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self, n_features: Option<usize>) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::validation("RF: n_trees must be ≥ 1"));
        }
        if self.mtry == 0 {
            return Err(Error::validation("RF: mtry must be ≥ 1"));
        }
        if let Some(d) = n_features {
            if self.mtry > d {
                return Err(Error::validation(format!(
                    "RF: mtry = {} exceeds the {d} features",
                    self.mtry
                )));
            }
        }
        if self.min_samples_split < 2 || self.max_depth == Some(0) {
            return Err(Error::validation(
                "RF: min_samples_split ≥ 2 and max_depth ≥ 1 required",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaggingConfig {
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub bootstrap_mode: BootstrapMode,
}

impl Default for BaggingConfig {
    fn default() -> Self {
        BaggingConfig {
            n_estimators: 10,
            bootstrap: true,
            bootstrap_mode: BootstrapMode::Weighted,
        }
    }
}

impl BaggingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::validation("BAG: n_estimators must be ≥ 1"));
        }
        Ok(())
    }
}

/// An averaged ensemble of classification trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<ClassificationTree>,
    pub mtry: usize,
    pub tree_seeds: Vec<u64>,
    pub n_features: usize,
}

/// Per-row multiplicities of one bootstrap resample of `n` draws.
pub fn bootstrap_counts(weights: &[f64], mode: BootstrapMode, tree_rng: &mut impl RngCore) -> Vec<u32> {
    let n = weights.len();
    let mut counts = vec![0u32; n];
    match mode {
        BootstrapMode::Weighted => {
            let dist = WeightedIndex::new(weights).expect("weights are positive");
            for _ in 0..n {
                counts[dist.sample(tree_rng)] += 1;
            }
        }
        BootstrapMode::Uniform => {
            let dist = Uniform::new(0, n).expect("nonempty");
            for _ in 0..n {
                counts[dist.sample(tree_rng)] += 1;
            }
        }
    }
    counts
}

pub fn fit_random_forest(data: &EncodedDataset, config: &ForestConfig, seed: u64) -> Result<ForestModel> {
    config.validate(Some(data.n_features()))?;
    Ok(fit_ensemble(
        data,
        config.n_trees,
        Some(config.mtry),
        GrowParams {
            max_depth: config.max_depth,
            min_samples_split: config.min_samples_split,
            mtry: Some(config.mtry),
        },
        config.bootstrap.then_some(config.bootstrap_mode),
        seed,
    ))
}

pub fn fit_bagging(data: &EncodedDataset, config: &BaggingConfig, seed: u64) -> Result<ForestModel> {
    config.validate()?;
    Ok(fit_ensemble(
        data,
        config.n_estimators,
        None,
        GrowParams {
            max_depth: None,
            min_samples_split: 2,
            mtry: None,
        },
        config.bootstrap.then_some(config.bootstrap_mode),
        seed,
    ))
}

fn fit_ensemble(
    data: &EncodedDataset,
    n_trees: usize,
    mtry: Option<usize>,
    params: GrowParams,
    bootstrap: Option<BootstrapMode>,
    seed: u64,
) -> ForestModel {
    let pre = Presorted::new(data.features());
    let mut master = rng(seed);
    let tree_seeds: Vec<u64> = (0..n_trees).map(|_| master.next_u64()).collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut tree_rng = rng(s);
            let row_weight: Vec<f64> = match bootstrap {
                None => data.weights().to_vec(),
                Some(mode) => {
                    let counts = bootstrap_counts(data.weights(), mode, &mut tree_rng);
                    match mode {
                        BootstrapMode::Weighted => counts.iter().map(|&c| f64::from(c)).collect(),
                        BootstrapMode::Uniform => counts
                            .iter()
                            .zip(data.weights())
                            .map(|(&c, w)| f64::from(c) * w)
                            .collect(),
                    }
                }
            };
            grow_classifier(&pre, data.labels(), &row_weight, params, Some(&mut tree_rng))
        })
        .collect();
    ForestModel {
        trees,
        mtry: mtry.unwrap_or(data.n_features()),
        tree_seeds,
        n_features: data.n_features(),
    }
}

impl ForestModel {
    /// Unweighted mean of the trees' leaf class fractions.
    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut acc = [0.0; N_CLASSES];
        for t in &self.trees {
            let p = t.predict_proba_row(x);
            acc.iter_mut().zip(&p).for_each(|(a, v)| *a += v);
        }
        let n = self.trees.len() as f64;
        acc.map(|a| a / n)
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        crate::linear::rows_to_proba(x, |row| self.predict_proba_row(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::cart::{fit_cart, CartConfig};
    use crate::util::argmax;
    use rand::Rng;

    fn noisy_data(seed: u64, n: usize) -> EncodedDataset {
        let mut r = rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| r.random_range(0..6) as f64).collect())
            .collect();
        let labels = rows
            .iter()
            .map(|x| ((x[0] + x[1]) as usize + r.random_range(0..2)) % 3)
            .collect();
        let weights = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
        EncodedDataset::from_rows(&rows, labels, weights).unwrap()
    }

    #[test]
    fn degenerate_forest_is_cart() {
        let data = noisy_data(1, 150);
        let cfg = ForestConfig {
            n_trees: 1,
            mtry: 4,
            bootstrap: false,
            ..ForestConfig::default()
        };
        let rf = fit_random_forest(&data, &cfg, 7).unwrap();
        let cart = fit_cart(&data, &CartConfig::default()).unwrap();
        assert_eq!(rf.trees[0].nodes, cart.nodes);
        let bag = fit_bagging(
            &data,
            &BaggingConfig {
                n_estimators: 1,
                bootstrap: false,
                ..BaggingConfig::default()
            },
            3,
        )
        .unwrap();
        assert_eq!(bag.trees[0].nodes, cart.nodes);
    }

    #[test]
    fn same_seed_same_forest() {
        let data = noisy_data(2, 120);
        let a = fit_random_forest(&data, &ForestConfig::default(), 5).unwrap();
        let b = fit_random_forest(&data, &ForestConfig::default(), 5).unwrap();
        assert_eq!(a, b);
        let c = fit_random_forest(&data, &ForestConfig::default(), 6).unwrap();
        assert_ne!(a.tree_seeds, c.tree_seeds);
    }

    #[test]
    fn averaging_is_order_free() {
        let data = noisy_data(3, 100);
        let rf = fit_random_forest(&data, &ForestConfig::default(), 9).unwrap();
        let mut reversed = rf.clone();
        reversed.trees.reverse();
        for row in data.features().rows() {
            let (a, b) = (rf.predict_proba_row(row), reversed.predict_proba_row(row));
            assert_eq!(argmax(&a), argmax(&b));
            for c in 0..N_CLASSES {
                assert!((a[c] - b[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bootstrap_draws_n_rows() {
        let w = [1.0, 2.0, 0.5, 4.0];
        let mut r = rng(0);
        for mode in [BootstrapMode::Weighted, BootstrapMode::Uniform] {
            let c = bootstrap_counts(&w, mode, &mut r);
            assert_eq!(c.iter().sum::<u32>(), 4);
        }
    }

    #[test]
    fn mtry_above_d_is_rejected() {
        let data = noisy_data(4, 20);
        let cfg = ForestConfig {
            mtry: 5,
            ..ForestConfig::default()
        };
        assert!(matches!(fit_random_forest(&data, &cfg, 0), Err(Error::Validation(_))));
    }
}
