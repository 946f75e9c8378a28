//! Gaussian naive Bayes with weighted class moments.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::masked_softmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbConfig {
    /// Variance floor as a fraction of the largest feature variance.
    pub var_smoothing: f64,
}

impl Default for NbConfig {
    fn default() -> Self {
        NbConfig { var_smoothing: 1e-9 }
    }
}

impl NbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.var_smoothing > 0.0 && self.var_smoothing.is_finite()) {
            return Err(Error::validation("NB: var_smoothing must be positive"));
        }
        Ok(())
    }
}

/// Per-class weighted prior, feature means and feature variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianClassStats {
    pub priors: [f64; N_CLASSES],
    /// `5 × D`
    pub means: Array2<f64>,
    /// `5 × D`, each entry already includes `epsilon`.
    pub variances: Array2<f64>,
    pub epsilon: f64,
    pub present: [bool; N_CLASSES],
}

pub fn fit_gaussian_nb(data: &EncodedDataset, config: &NbConfig) -> Result<GaussianClassStats> {
    config.validate()?;
    let d = data.n_features();
    let x = data.features();
    let w = data.weights();
    let class_w = data.class_weights();
    let total: f64 = class_w.iter().sum();

    let mut means = Array2::<f64>::zeros((N_CLASSES, d));
    for ((row, &y), &wi) in x.rows().into_iter().zip(data.labels()).zip(w) {
        let mut m = means.row_mut(y);
        m.scaled_add(wi, &row);
    }
    for (c, &cw) in class_w.iter().enumerate() {
        if cw > 0.0 {
            means.row_mut(c).mapv_inplace(|v| v / cw);
        }
    }
    let mut variances = Array2::<f64>::zeros((N_CLASSES, d));
    for ((row, &y), &wi) in x.rows().into_iter().zip(data.labels()).zip(w) {
        for j in 0..d {
            let dev = row[j] - means[[y, j]];
            variances[[y, j]] += wi * dev * dev;
        }
    }
    for (c, &cw) in class_w.iter().enumerate() {
        if cw > 0.0 {
            variances.row_mut(c).mapv_inplace(|v| v / cw);
        }
    }

    // Largest weighted variance over the whole training set.
    let overall_mean: Vec<f64> = (0..d)
        .map(|j| x.column(j).iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>() / total)
        .collect();
    let max_var = (0..d)
        .map(|j| {
            x.column(j)
                .iter()
                .zip(w)
                .map(|(v, wi)| wi * (v - overall_mean[j]).powi(2))
                .sum::<f64>()
                / total
        })
        .fold(0.0, f64::max);
    let epsilon = config.var_smoothing * if max_var > 0.0 { max_var } else { 1.0 };
    variances.mapv_inplace(|v| v + epsilon);

    Ok(GaussianClassStats {
        priors: class_w.map(|c| c / total),
        means,
        variances,
        epsilon,
        present: data.present_classes(),
    })
}

impl GaussianClassStats {
    /// Joint log-likelihood per class; absent classes get negative infinity.
    pub fn joint_log_likelihood(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut out = [f64::NEG_INFINITY; N_CLASSES];
        for (c, o) in out.iter_mut().enumerate() {
            if !self.present[c] {
                continue;
            }
            let mut ll = self.priors[c].ln();
            for ((v, m), s2) in x.iter().zip(self.means.row(c)).zip(self.variances.row(c)) {
                ll -= 0.5 * (2.0 * std::f64::consts::PI * s2).ln() + (v - m).powi(2) / (2.0 * s2);
            }
            *o = ll;
        }
        out
    }

    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut s = self.joint_log_likelihood(x);
        masked_softmax(&mut s, &self.present);
        s
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        super::rows_to_proba(x, |row| self.predict_proba_row(row))
    }
}
