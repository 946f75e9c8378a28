//! Impurity-decrease feature importance for tree ensembles.
//!
//! Each tree contributes, per feature, the weighted impurity decrease of its
//! splits on that feature divided by the tree's root weight. Contributions are
//! summed over trees and normalized to sum to one. A model without any split
//! gets a uniform vector.

/// Normalized importance from per-tree `(impurity_decrease, root_weight)` pairs.
pub fn impurity_importance<'a>(trees: impl IntoIterator<Item = (&'a [f64], f64)>, n_features: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_features];
    for (dec, root) in trees {
        if root > 0.0 {
            for (a, d) in acc.iter_mut().zip(dec) {
                *a += d / root;
            }
        }
    }
    let total: f64 = acc.iter().sum();
    if total > 0.0 {
        acc.iter_mut().for_each(|a| *a /= total);
    } else if n_features > 0 {
        acc.fill(1.0 / n_features as f64);
    }
    acc
}
