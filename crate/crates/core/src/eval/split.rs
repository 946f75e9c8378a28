//! Holdout splits and k-fold partitions.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::rng;

/// Fraction of rows assigned to the test set, strictly between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SplitRatio(f64);

impl SplitRatio {
    pub fn new(ratio: f64) -> Result<Self> {
        if ratio > 0.0 && ratio < 1.0 {
            Ok(SplitRatio(ratio))
        } else {
            Err(Error::validation(format!("split ratio {ratio} must lie in (0, 1)")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Test-set size for `n` rows: `round(ratio · n)`.
    pub fn test_size(self, n: usize) -> usize {
        (self.0 * n as f64).round() as usize
    }
}

impl TryFrom<f64> for SplitRatio {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        SplitRatio::new(v)
    }
}

impl From<SplitRatio> for f64 {
    fn from(r: SplitRatio) -> f64 {
        r.0
    }
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    idx
}

/// Train and test row indices, both sorted ascending.
///
/// With `strata` set, each class is split separately and its test share is
/// `round(ratio · n_class)`, so the total can differ from the unstratified
/// size by a few rows.
pub fn holdout_indices(
    n: usize,
    ratio: SplitRatio,
    seed: u64,
    strata: Option<&[usize]>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::validation("holdout split needs at least two rows"));
    }
    let perm = shuffled(n, seed);
    let (mut train, mut test) = match strata {
        None => {
            let t = ratio.test_size(n);
            let (test, train) = perm.split_at(t);
            (train.to_vec(), test.to_vec())
        }
        Some(labels) => {
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); N_CLASSES];
            for i in perm {
                by_class[labels[i]].push(i);
            }
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for rows in by_class {
                let t = ratio.test_size(rows.len());
                test.extend_from_slice(&rows[..t]);
                train.extend_from_slice(&rows[t..]);
            }
            (train, test)
        }
    };
    if train.is_empty() || test.is_empty() {
        return Err(Error::validation(format!(
            "ratio {} on {n} rows leaves {} train and {} test rows",
            ratio.get(),
            train.len(),
            test.len()
        )));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Unstratified seeded holdout split.
pub fn holdout_split(data: &EncodedDataset, ratio: f64, seed: u64) -> Result<(EncodedDataset, EncodedDataset)> {
    let (train, test) = holdout_indices(data.n_samples(), SplitRatio::new(ratio)?, seed, None)?;
    Ok((data.subset(&train)?, data.subset(&test)?))
}

/// Holdout split that preserves class proportions.
pub fn holdout_split_stratified(
    data: &EncodedDataset,
    ratio: f64,
    seed: u64,
) -> Result<(EncodedDataset, EncodedDataset)> {
    let (train, test) = holdout_indices(data.n_samples(), SplitRatio::new(ratio)?, seed, Some(data.labels()))?;
    Ok((data.subset(&train)?, data.subset(&test)?))
}

/// Fold membership of every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub k: usize,
}

/// Seeded permutation cut into `k` folds whose sizes differ by at most one.
/// The first `n mod k` folds get the extra row.
pub fn kfold_partition(n: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 || k > n {
        return Err(Error::validation(format!("fold count {k} must satisfy 2 ≤ k ≤ {n}")));
    }
    let perm = shuffled(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut fold_of = vec![0; n];
    let mut pos = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &i in &perm[pos..pos + size] {
            fold_of[i] = f;
        }
        pos += size;
    }
    Ok(FoldAssignment { fold_of, k })
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }

    /// `(fit rows, evaluation rows)` for fold `f`; disjoint by construction.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.fold_of.len()).partition(|&i| self.fold_of[i] != f)
    }
}
