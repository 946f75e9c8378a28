//! One-vs-rest linear SVM trained by full-batch subgradient descent.
//!
//! Each present class `c` gets a separate binary problem over standardized
//! features with targets `+1` (label `c`) and `-1` (everything else):
//!
//! ```text
//! J(w, b) = ½ λ ‖w‖² + Σᵢ pᵢ · max(0, 1 − yᵢ (w·zᵢ + b)),   λ = 1 / C
//! ```
//!
//! where `pᵢ` are the sample weights normalized to sum to one. The bias is
//! not regularized. Because only normalized weights enter, duplicating a row
//! and doubling its weight give the same objective, and rescaling all
//! weights changes nothing.
//!
//! Class probabilities are a softmax over the decision values. They are a
//! reporting convenience only; labels come from the decision values.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::{masked_softmax, Standardizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub c: f64,
    pub max_iter: usize,
    /// Initial step size; step `t` uses `step / √t`.
    pub step: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            max_iter: 1000,
            step: 1.0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::validation("SVM: C must be positive"));
        }
        if self.max_iter == 0 || !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::validation("SVM: max_iter must be ≥ 1 and step > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmParameters {
    /// `5 × (D + 1)`, last column the bias. Rows of absent classes are zero.
    pub weights: Array2<f64>,
    pub present: [bool; N_CLASSES],
    pub c: f64,
    pub standardizer: Standardizer,
    /// Final objective of each one-vs-rest problem (0 for absent classes).
    pub objective: [f64; N_CLASSES],
}

/// Objective and a subgradient of one binary problem.
///
/// `w` holds `D` weights followed by the bias; `y` holds ±1 targets and `p`
/// normalized sample weights. At a kink the subgradient of the hinge is
/// taken as zero.
pub fn hinge_objective(w: &[f64], z: ArrayView2<'_, f64>, y: &[f64], p: &[f64], lambda: f64) -> (f64, Vec<f64>) {
    let d = z.ncols();
    let (coef, bias) = (&w[..d], w[d]);
    let mut value = 0.5 * lambda * coef.iter().map(|v| v * v).sum::<f64>();
    let mut grad: Vec<f64> = coef.iter().map(|v| lambda * v).chain([0.0]).collect();
    for ((zi, &yi), &pi) in z.rows().into_iter().zip(y).zip(p) {
        let margin = yi * (zi.iter().zip(coef).map(|(a, b)| a * b).sum::<f64>() + bias);
        if margin < 1.0 {
            value += pi * (1.0 - margin);
            for (g, v) in grad.iter_mut().zip(zi) {
                *g -= pi * yi * v;
            }
            grad[d] -= pi * yi;
        }
    }
    (value, grad)
}

pub fn fit_linear_svm(data: &EncodedDataset, config: &SvmConfig) -> Result<LinearSvmParameters> {
    config.validate()?;
    let present = data.present_classes();
    if present.iter().filter(|p| **p).count() < 2 {
        return Err(Error::validation("SVM needs at least two classes in the training data"));
    }
    let standardizer = Standardizer::fit(data.features(), data.weights());
    let (n, d) = data.features().dim();
    let mut z = Array2::zeros((n, d));
    for (i, row) in data.features().rows().into_iter().enumerate() {
        standardizer.transform_into(row, z.row_mut(i).as_slice_mut().expect("standard layout"));
    }
    let total = data.total_weight();
    let p: Vec<f64> = data.weights().iter().map(|w| w / total).collect();
    let lambda = 1.0 / config.c;

    let mut weights = Array2::zeros((N_CLASSES, d + 1));
    let mut objective = [0.0; N_CLASSES];
    for c in (0..N_CLASSES).filter(|&c| present[c]) {
        let y: Vec<f64> = data.labels().iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
        let mut w = vec![0.0; d + 1];
        let (mut best_val, _) = hinge_objective(&w, z.view(), &y, &p, lambda);
        let mut best = w.clone();
        for t in 1..=config.max_iter {
            let (val, grad) = hinge_objective(&w, z.view(), &y, &p, lambda);
            if !val.is_finite() {
                return Err(Error::Numerical {
                    stage: "iteration",
                    index: t,
                    message: format!("non-finite hinge objective for class {c}"),
                });
            }
            if val < best_val {
                best_val = val;
                best.clone_from(&w);
            }
            let eta = config.step / (t as f64).sqrt();
            w.iter_mut().zip(&grad).for_each(|(wi, gi)| *wi -= eta * gi);
        }
        let (val, _) = hinge_objective(&w, z.view(), &y, &p, lambda);
        if val < best_val {
            best_val = val;
            best = w;
        }
        weights.row_mut(c).iter_mut().zip(&best).for_each(|(a, b)| *a = *b);
        objective[c] = best_val;
    }
    Ok(LinearSvmParameters {
        weights,
        present,
        c: config.c,
        standardizer,
        objective,
    })
}

impl LinearSvmParameters {
    /// One-vs-rest decision values; absent classes get negative infinity.
    pub fn decision_values(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let z = self.standardizer.transform_row(x);
        let d = z.len();
        let mut out = [f64::NEG_INFINITY; N_CLASSES];
        for (c, o) in out.iter_mut().enumerate() {
            if self.present[c] {
                let w = self.weights.row(c);
                *o = w[d] + w.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        out
    }

    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut s = self.decision_values(x);
        masked_softmax(&mut s, &self.present);
        s
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        super::rows_to_proba(x, |row| self.predict_proba_row(row))
    }
}
