//! Weighted confusion matrices and per-mode precision, recall and F1.

use serde::{Deserialize, Serialize};

use crate::dataset::N_CLASSES;
use crate::error::{Error, Result};

/// Entry `(i, j)` is the total weight of true class `i` predicted as `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[f64; N_CLASSES]; N_CLASSES]);

impl ConfusionMatrix {
    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> f64 {
        (0..N_CLASSES).map(|c| self.0[c][c]).sum()
    }

    /// Row sums: weight of each true class.
    pub fn support(&self) -> [f64; N_CLASSES] {
        self.0.map(|row| row.iter().sum())
    }

    /// Column sums: weight predicted as each class.
    pub fn predicted(&self) -> [f64; N_CLASSES] {
        std::array::from_fn(|j| self.0.iter().map(|row| row[j]).sum())
    }

    /// Row-major 25-entry vector.
    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    /// 0 where nothing was predicted as the class; see `precision_undefined`.
    pub precision: [f64; N_CLASSES],
    pub precision_undefined: [bool; N_CLASSES],
    /// `None` where the class has no support.
    pub recall: [Option<f64>; N_CLASSES],
    pub f1: [Option<f64>; N_CLASSES],
    pub support: [f64; N_CLASSES],
    pub confusion: ConfusionMatrix,
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], weights: &[f64]) -> Result<ConfusionMatrix> {
    if y_pred.len() != y_true.len() || weights.len() != y_true.len() {
        return Err(Error::Shape {
            what: "entries",
            expected: y_true.len(),
            found: if y_pred.len() != y_true.len() {
                y_pred.len()
            } else {
                weights.len()
            },
        });
    }
    let mut m = [[0.0; N_CLASSES]; N_CLASSES];
    for ((&t, &p), &w) in y_true.iter().zip(y_pred).zip(weights) {
        if t >= N_CLASSES || p >= N_CLASSES {
            return Err(Error::Data(format!("class index {} out of range", t.max(p))));
        }
        m[t][p] += w;
    }
    Ok(ConfusionMatrix(m))
}

/// Weighted metrics of `y_pred` against `y_true`.
pub fn compute_metrics(y_true: &[usize], y_pred: &[usize], weights: &[f64]) -> Result<MetricsReport> {
    if y_true.is_empty() {
        return Err(Error::Data("no rows to evaluate".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::Data(format!("evaluation weight {w} is not positive")));
    }
    let confusion = confusion_matrix(y_true, y_pred, weights)?;
    Ok(report_from_confusion(confusion))
}

pub fn report_from_confusion(confusion: ConfusionMatrix) -> MetricsReport {
    let support = confusion.support();
    let predicted = confusion.predicted();
    let mut precision = [0.0; N_CLASSES];
    let mut precision_undefined = [false; N_CLASSES];
    let mut recall = [None; N_CLASSES];
    let mut f1 = [None; N_CLASSES];
    for c in 0..N_CLASSES {
        let tp = confusion.0[c][c];
        if predicted[c] > 0.0 {
            precision[c] = tp / predicted[c];
        } else {
            precision_undefined[c] = true;
        }
        if support[c] > 0.0 {
            let r = tp / support[c];
            recall[c] = Some(r);
            let p = precision[c];
            f1[c] = Some(if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 });
        }
    }
    MetricsReport {
        accuracy: confusion.trace() / confusion.total(),
        precision,
        precision_undefined,
        recall,
        f1,
        support,
        confusion,
    }
}

/// Weighted share of correct predictions.
pub fn weighted_accuracy(y_true: &[usize], y_pred: &[usize], weights: &[f64]) -> f64 {
    let (mut hit, mut total) = (0.0, 0.0);
    for ((t, p), w) in y_true.iter().zip(y_pred).zip(weights) {
        total += w;
        if t == p {
            hit += w;
        }
    }
    hit / total
}
