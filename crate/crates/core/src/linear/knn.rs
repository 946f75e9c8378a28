//! k-nearest neighbours with a sample-weighted majority vote.
//!
//! Encoded ordinal and categorical codes are treated as numeric coordinates
//! and compared with the Euclidean distance. Training rows are stored in a
//! content-derived order, so "lower index wins a distance tie" does not
//! depend on the order rows were supplied in.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::canonical_order;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 5 }
    }
}

impl KnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::validation("KNN: k must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnStore {
    pub x: Array2<f64>,
    pub labels: Vec<usize>,
    pub weights: Vec<f64>,
    pub k: usize,
}

pub fn fit_knn(data: &EncodedDataset, config: &KnnConfig) -> Result<KnnStore> {
    config.validate()?;
    if config.k > data.n_samples() {
        return Err(Error::validation(format!(
            "KNN: k = {} exceeds the {} training rows",
            config.k,
            data.n_samples()
        )));
    }
    let order = canonical_order(data.features(), data.labels(), data.weights());
    Ok(KnnStore {
        x: data.features().select(Axis(0), &order),
        labels: order.iter().map(|&i| data.labels()[i]).collect(),
        weights: order.iter().map(|&i| data.weights()[i]).collect(),
        k: config.k,
    })
}

impl KnnStore {
    /// Indices of the `k` nearest stored rows; equal distances favour lower indices.
    pub fn neighbours(&self, q: ArrayView1<'_, f64>) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, cmp);
            dist.truncate(self.k);
        }
        dist.sort_by(cmp);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    /// Weighted vote fractions among the nearest neighbours.
    pub fn predict_proba_row(&self, q: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut votes = [0.0; N_CLASSES];
        for i in self.neighbours(q) {
            votes[self.labels[i]] += self.weights[i];
        }
        let total: f64 = votes.iter().sum();
        votes.map(|v| v / total)
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let rows: Vec<[f64; N_CLASSES]> = (0..x.nrows())
            .into_par_iter()
            .map(|i| self.predict_proba_row(x.row(i)))
            .collect();
        let mut out = Array2::zeros((x.nrows(), N_CLASSES));
        for (i, r) in rows.iter().enumerate() {
            out.row_mut(i).iter_mut().zip(r).for_each(|(o, v)| *o = *v);
        }
        out
    }
}
