//! Small numeric helpers shared by the learners.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::N_CLASSES;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A child seed that depends only on `seed` and `tag`.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// In-place softmax over the entries where `mask` is set; masked-out entries become 0.
pub(crate) fn masked_softmax(scores: &mut [f64], mask: &[bool]) {
    let max = scores
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(s, _)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (s, m) in scores.iter_mut().zip(mask) {
        if *m {
            *s = (*s - max).exp();
            sum += *s;
        } else {
            *s = 0.0;
        }
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

#[cfg(test)]
pub(crate) fn softmax(scores: &mut [f64]) {
    let mask = vec![true; scores.len()];
    masked_softmax(scores, &mask);
}

/// Normalizes a nonnegative vector to sum to one.
pub(crate) fn normalize(counts: &[f64]) -> [f64; N_CLASSES] {
    let total: f64 = counts.iter().sum();
    let mut out = [0.0; N_CLASSES];
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c / total;
    }
    out
}

/// Weighted per-feature affine transform to zero mean and unit variance.
/// Constant features keep scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<'_, f64>, weights: &[f64]) -> Standardizer {
        let d = x.ncols();
        let total: f64 = weights.iter().sum();
        let mut mean = vec![0.0; d];
        for (row, w) in x.rows().into_iter().zip(weights) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += w * v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= total);
        let mut var = vec![0.0; d];
        for (row, w) in x.rows().into_iter().zip(weights) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += w * (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / total).sqrt();
                if sd > 1e-12 * (1.0 + sd) && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform_row(&self, row: ArrayView1<'_, f64>) -> Array1<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform_into(&self, row: ArrayView1<'_, f64>, out: &mut [f64]) {
        for (((o, v), m), s) in out.iter_mut().zip(row).zip(&self.mean).zip(&self.scale) {
            *o = (v - m) / s;
        }
    }
}

/// Row order that depends only on row contents: lexicographic by features,
/// then label, then weight. Learners that would otherwise depend on input
/// order (tie handling, mini-batch order) work on this order instead.
pub(crate) fn canonical_order(x: ArrayView2<'_, f64>, labels: &[usize], weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..labels.len()).collect();
    idx.sort_by(|&a, &b| {
        for (va, vb) in x.row(a).iter().zip(x.row(b).iter()) {
            match va.total_cmp(vb) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        labels[a].cmp(&labels[b]).then(weights[a].total_cmp(&weights[b]))
    });
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn derived_seeds_differ_by_tag() {
        assert_eq!(derive_seed(1, "a"), derive_seed(1, "a"));
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.1, 0.2, 0.5, 0.1, 0.1]), 2);
        assert_eq!(argmax(&[0.3, 0.3, 0.2, 0.1, 0.1]), 0);
        assert_eq!(argmax(&[0.0, 0.4, 0.4]), 1);
    }

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let mut s = [0.0; 5];
        softmax(&mut s);
        assert!(s.iter().all(|p| (p - 0.2).abs() < 1e-15));
        let mut m = [1.0, 2.0, 3.0];
        masked_softmax(&mut m, &[true, false, true]);
        assert_eq!(m[1], 0.0);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn standardizer_weighted_moments() {
        let x = array![[0.0, 5.0], [2.0, 5.0]];
        let s = Standardizer::fit(x.view(), &[1.0, 3.0]);
        assert!((s.mean[0] - 1.5).abs() < 1e-15);
        // weighted variance 0.75
        assert!((s.scale[0] - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.scale[1], 1.0);
    }
}
