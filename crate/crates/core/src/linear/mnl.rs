//! Multinomial logit fitted by minimizing weighted cross-entropy.
//!
//! Features are standardized internally; the coefficients live in the
//! standardized space and the transform is stored with them. The lowest
//! present class is the reference: its coefficient row is fixed at zero.
//! Classes absent from training receive probability zero.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::optim::lbfgs;
use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::{masked_softmax, Standardizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MnlConfig {
    pub max_iter: usize,
    /// Stop once the gradient max-norm falls below this.
    pub tol: f64,
}

impl Default for MnlConfig {
    fn default() -> Self {
        MnlConfig {
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

impl MnlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::validation("MNL: max_iter must be ≥ 1 and tol > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnlModel {
    /// `5 × (D + 1)`; last column is the intercept. Reference row is zero.
    pub coefficients: Array2<f64>,
    pub reference_class: usize,
    pub present: [bool; N_CLASSES],
    pub standardizer: Standardizer,
    pub converged: bool,
    pub iterations: usize,
    pub loss_history: Vec<f64>,
}

/// Weighted mean cross-entropy of an MNL in standardized space, as a function
/// of the free coefficient rows (every present class except the reference).
pub struct MnlObjective {
    z: Array2<f64>,
    labels: Vec<usize>,
    /// Weights normalized to sum to one.
    p: Vec<f64>,
    present: [bool; N_CLASSES],
    free: Vec<usize>,
}

impl MnlObjective {
    pub fn new(data: &EncodedDataset) -> Result<(Self, Standardizer)> {
        let present = data.present_classes();
        let classes: Vec<usize> = (0..N_CLASSES).filter(|&c| present[c]).collect();
        if classes.len() < 2 {
            return Err(Error::validation("MNL needs at least two classes in the training data"));
        }
        let std = Standardizer::fit(data.features(), data.weights());
        let mut z = Array2::zeros(data.features().dim());
        for (i, row) in data.features().rows().into_iter().enumerate() {
            std.transform_into(row, z.row_mut(i).as_slice_mut().expect("standard layout"));
        }
        let total = data.total_weight();
        Ok((
            MnlObjective {
                z,
                labels: data.labels().to_vec(),
                p: data.weights().iter().map(|w| w / total).collect(),
                present,
                free: classes[1..].to_vec(),
            },
            std,
        ))
    }

    pub fn n_params(&self) -> usize {
        self.free.len() * (self.z.ncols() + 1)
    }

    fn unpack(&self, theta: &[f64]) -> Array2<f64> {
        let d1 = self.z.ncols() + 1;
        let mut coef = Array2::zeros((N_CLASSES, d1));
        for (k, &c) in self.free.iter().enumerate() {
            coef.row_mut(c)
                .iter_mut()
                .zip(&theta[k * d1..(k + 1) * d1])
                .for_each(|(a, b)| *a = *b);
        }
        coef
    }

    pub fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let d = self.z.ncols();
        let coef = self.unpack(theta);
        let mut loss = 0.0;
        let mut grad_full = Array2::<f64>::zeros((N_CLASSES, d + 1));
        let mut probs = [0.0; N_CLASSES];
        for (i, zi) in self.z.rows().into_iter().enumerate() {
            scores_into(&coef, zi, &mut probs);
            masked_softmax(&mut probs, &self.present);
            let y = self.labels[i];
            let pi = self.p[i];
            loss -= pi * probs[y].max(f64::MIN_POSITIVE).ln();
            for &c in &self.free {
                let r = pi * (probs[c] - if c == y { 1.0 } else { 0.0 });
                let mut g = grad_full.row_mut(c);
                for (gj, zj) in g.iter_mut().zip(zi) {
                    *gj += r * zj;
                }
                g[d] += r;
            }
        }
        let grad = self.free.iter().flat_map(|&c| grad_full.row(c).to_vec()).collect();
        (loss, grad)
    }
}

fn scores_into(coef: &Array2<f64>, z: ArrayView1<'_, f64>, out: &mut [f64; N_CLASSES]) {
    let d = z.len();
    for (c, o) in out.iter_mut().enumerate() {
        let row = coef.row(c);
        let mut s = row[d];
        for (w, v) in row.iter().zip(z) {
            s += w * v;
        }
        *o = s;
    }
}

pub fn fit_mnl(data: &EncodedDataset, config: &MnlConfig) -> Result<MnlModel> {
    config.validate()?;
    let (objective, standardizer) = MnlObjective::new(data)?;
    let theta0 = vec![0.0; objective.n_params()];
    let min = lbfgs(
        |theta| objective.value_and_gradient(theta),
        theta0,
        config.max_iter,
        config.tol,
    )?;
    Ok(MnlModel {
        coefficients: objective.unpack(&min.x),
        reference_class: objective.present.iter().position(|&p| p).expect("two classes present"),
        present: objective.present,
        standardizer,
        converged: min.converged,
        iterations: min.loss_history.len() - 1,
        loss_history: min.loss_history,
    })
}

impl MnlModel {
    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let z = self.standardizer.transform_row(x);
        let mut out = [0.0; N_CLASSES];
        scores_into(&self.coefficients, z.view(), &mut out);
        masked_softmax(&mut out, &self.present);
        out
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        super::rows_to_proba(x, |row| self.predict_proba_row(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng;
    use rand::Rng;

    #[test]
    fn zero_coefficients_give_uniform_probabilities() {
        let data = EncodedDataset::from_rows(
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![5.0]],
            vec![0, 1, 2, 3, 4],
            vec![1.0; 5],
        )
        .unwrap();
        let (obj, std) = MnlObjective::new(&data).unwrap();
        let model = MnlModel {
            coefficients: obj.unpack(&vec![0.0; obj.n_params()]),
            reference_class: 0,
            present: [true; 5],
            standardizer: std,
            converged: false,
            iterations: 0,
            loss_history: vec![],
        };
        for row in data.features().rows() {
            let p = model.predict_proba_row(row);
            assert!(p.iter().all(|v| (v - 0.2).abs() < 1e-15));
        }
    }

    #[test]
    fn intercept_only_recovers_weighted_shares() {
        let data =
            EncodedDataset::from_rows(&[vec![7.0], vec![7.0], vec![7.0]], vec![0, 1, 1], vec![1.0, 1.0, 2.0]).unwrap();
        let model = fit_mnl(&data, &MnlConfig::default()).unwrap();
        assert!(model.converged);
        let p = model.predict_proba_row(data.row(0));
        assert!((p[0] - 0.25).abs() < 1e-6, "{p:?}");
        assert!((p[1] - 0.75).abs() < 1e-6, "{p:?}");
        assert_eq!(&p[2..], &[0.0, 0.0, 0.0]);
        // Intercept difference equals log of the weighted share ratio.
        let d = model.coefficients.ncols() - 1;
        assert!((model.coefficients[[1, d]] - 3f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn loss_never_increases() {
        let mut r = rng(4);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect();
        let labels: Vec<usize> = rows
            .iter()
            .map(|x| {
                if x[0] + 0.3 * r.random::<f64>() > 0.6 {
                    2
                } else if x[1] > 0.5 {
                    1
                } else {
                    0
                }
            })
            .collect();
        let data = EncodedDataset::from_rows(&rows, labels, vec![1.0; 200]).unwrap();
        let model = fit_mnl(&data, &MnlConfig::default()).unwrap();
        assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(model.coefficients.row(0).iter().filter(|v| **v != 0.0).count(), 0);
    }

    #[test]
    fn softmax_shift_invariance() {
        let mut r = rng(9);
        let rows: Vec<Vec<f64>> = (0..50).map(|_| vec![r.random::<f64>(), r.random::<f64>()]).collect();
        let labels = (0..50).map(|i| i % 3).collect();
        let data = EncodedDataset::from_rows(&rows, labels, vec![1.0; 50]).unwrap();
        let model = fit_mnl(&data, &MnlConfig::default()).unwrap();
        let mut shifted = model.clone();
        for mut row in shifted.coefficients.rows_mut() {
            row += &ndarray::arr1(&[0.7, -1.3, 2.1]);
        }
        for row in data.features().rows() {
            let a = model.predict_proba_row(row);
            let b = shifted.predict_proba_row(row);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = EncodedDataset::from_rows(&[vec![1.0], vec![2.0]], vec![3, 3], vec![1.0; 2]).unwrap();
        assert!(matches!(
            fit_mnl(&data, &MnlConfig::default()),
            Err(Error::Validation(_))
        ));
    }
}
