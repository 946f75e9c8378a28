//! Single-hidden-layer perceptron: rectifier hidden units, softmax output,
//! weighted cross-entropy, mini-batch Adam updates.
//!
//! Inputs are standardized with weighted moments stored in the model. Rows
//! are put into a content-derived order before the seeded per-epoch shuffle,
//! so the fitted network does not depend on the order rows were supplied in.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::util::{canonical_order, masked_softmax, rng, Standardizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden_units: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_units: 100,
            epochs: 200,
            learning_rate: 1e-3,
            batch_size: 200,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::validation(
                "ANN: hidden_units, epochs and batch_size must be ≥ 1",
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::validation("ANN: learning_rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParameters {
    /// `D × H`
    pub w_hidden: Array2<f64>,
    pub b_hidden: Array1<f64>,
    /// `H × 5`
    pub w_out: Array2<f64>,
    pub b_out: Array1<f64>,
    pub present: [bool; N_CLASSES],
    pub standardizer: Standardizer,
    pub final_loss: f64,
}

/// Gradient with the same shapes as the trainable parameters.
pub struct MlpGradient {
    pub w_hidden: Array2<f64>,
    pub b_hidden: Array1<f64>,
    pub w_out: Array2<f64>,
    pub b_out: Array1<f64>,
}

impl MlpParameters {
    /// Seeded uniform initialization scaled by fan-in plus fan-out.
    pub fn init(d: usize, hidden: usize, present: [bool; N_CLASSES], standardizer: Standardizer, seed: u64) -> Self {
        let mut r = rng(seed);
        let mut uniform = |rows: usize, cols: usize, fan_in: usize, fan_out: usize| {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || r.random_range(-bound..bound))
        };
        let w_hidden = uniform(d, hidden, d, hidden);
        let b_hidden = uniform(1, hidden, d, hidden).remove_axis(Axis(0));
        let w_out = uniform(hidden, N_CLASSES, hidden, N_CLASSES);
        let b_out = uniform(1, N_CLASSES, hidden, N_CLASSES).remove_axis(Axis(0));
        MlpParameters {
            w_hidden,
            b_hidden,
            w_out,
            b_out,
            present,
            standardizer,
            final_loss: f64::NAN,
        }
    }

    fn forward(&self, z: ArrayView2<'_, f64>) -> (Array2<f64>, Array2<f64>) {
        let mut hidden = z.dot(&self.w_hidden) + &self.b_hidden;
        hidden.mapv_inplace(|v| v.max(0.0));
        let mut out = hidden.dot(&self.w_out) + &self.b_out;
        for mut row in out.rows_mut() {
            masked_softmax(row.as_slice_mut().expect("standard layout"), &self.present);
        }
        (hidden, out)
    }

    /// Weighted mean cross-entropy over standardized rows `z` and its gradient.
    pub fn loss_and_gradient(&self, z: ArrayView2<'_, f64>, labels: &[usize], weights: &[f64]) -> (f64, MlpGradient) {
        let (hidden, probs) = self.forward(z);
        let total: f64 = weights.iter().sum();
        let mut loss = 0.0;
        let mut delta_out = probs;
        for (i, (&y, &w)) in labels.iter().zip(weights).enumerate() {
            let q = w / total;
            loss -= q * delta_out[[i, y]].max(f64::MIN_POSITIVE).ln();
            delta_out[[i, y]] -= 1.0;
            delta_out.row_mut(i).mapv_inplace(|v| v * q);
        }
        let g_w_out = hidden.t().dot(&delta_out);
        let g_b_out = delta_out.sum_axis(Axis(0));
        let mut delta_hidden = delta_out.dot(&self.w_out.t());
        delta_hidden.zip_mut_with(&hidden, |d, h| {
            if *h <= 0.0 {
                *d = 0.0;
            }
        });
        let g_w_hidden = z.t().dot(&delta_hidden);
        let g_b_hidden = delta_hidden.sum_axis(Axis(0));
        (
            loss,
            MlpGradient {
                w_hidden: g_w_hidden,
                b_hidden: g_b_hidden,
                w_out: g_w_out,
                b_out: g_b_out,
            },
        )
    }

    /// Trainable parameters flattened in the order hidden weights, hidden
    /// bias, output weights, output bias.
    pub fn to_flat(&self) -> Vec<f64> {
        self.w_hidden
            .iter()
            .chain(&self.b_hidden)
            .chain(&self.w_out)
            .chain(&self.b_out)
            .copied()
            .collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut it = flat.iter();
        for v in self
            .w_hidden
            .iter_mut()
            .chain(self.b_hidden.iter_mut())
            .chain(self.w_out.iter_mut())
            .chain(self.b_out.iter_mut())
        {
            *v = *it.next().expect("flat vector has the parameter count");
        }
    }

    pub fn standardize(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = Array2::zeros(x.dim());
        for (i, row) in x.rows().into_iter().enumerate() {
            self.standardizer
                .transform_into(row, z.row_mut(i).as_slice_mut().expect("standard layout"));
        }
        z
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let z = self.standardize(x);
        self.forward(z.view()).1
    }

    pub fn predict_proba_row(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let z = self.standardizer.transform_row(x).insert_axis(Axis(0));
        let p = self.forward(z.view()).1;
        std::array::from_fn(|c| p[[0, c]])
    }
}

impl MlpGradient {
    pub fn to_flat(&self) -> Vec<f64> {
        self.w_hidden
            .iter()
            .chain(&self.b_hidden)
            .chain(&self.w_out)
            .chain(&self.b_out)
            .copied()
            .collect()
    }
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

pub fn fit_mlp(data: &EncodedDataset, config: &MlpConfig, seed: u64) -> Result<MlpParameters> {
    config.validate()?;
    let present = data.present_classes();
    if present.iter().filter(|p| **p).count() < 2 {
        return Err(Error::validation("ANN needs at least two classes in the training data"));
    }
    let standardizer = Standardizer::fit(data.features(), data.weights());
    let mut params = MlpParameters::init(data.n_features(), config.hidden_units, present, standardizer, seed);

    let order = canonical_order(data.features(), data.labels(), data.weights());
    let z_all = params.standardize(data.features()).select(Axis(0), &order);
    let labels: Vec<usize> = order.iter().map(|&i| data.labels()[i]).collect();
    let weights: Vec<f64> = order.iter().map(|&i| data.weights()[i]).collect();

    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = labels.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let n_params = params.to_flat().len();
    let mut m = vec![0.0; n_params];
    let mut v = vec![0.0; n_params];
    let mut step = 0i32;
    let mut last_loss = f64::NAN;

    for epoch in 0..config.epochs {
        idx.shuffle(&mut r);
        let mut epoch_loss = 0.0;
        let mut epoch_weight = 0.0;
        for batch in idx.chunks(config.batch_size) {
            let zb = z_all.select(Axis(0), batch);
            let yb: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
            let wb: Vec<f64> = batch.iter().map(|&i| weights[i]).collect();
            let (loss, grad) = params.loss_and_gradient(zb.view(), &yb, &wb);
            if !loss.is_finite() {
                return Err(Error::Numerical {
                    stage: "epoch",
                    index: epoch,
                    message: format!("non-finite cross-entropy {loss}"),
                });
            }
            let bw: f64 = wb.iter().sum();
            epoch_loss += loss * bw;
            epoch_weight += bw;

            step += 1;
            let (c1, c2) = (1.0 - BETA1.powi(step), 1.0 - BETA2.powi(step));
            let mut theta = params.to_flat();
            for (((t, g), mi), vi) in theta.iter_mut().zip(grad.to_flat()).zip(&mut m).zip(&mut v) {
                *mi = BETA1 * *mi + (1.0 - BETA1) * g;
                *vi = BETA2 * *vi + (1.0 - BETA2) * g * g;
                *t -= config.learning_rate * (*mi / c1) / ((*vi / c2).sqrt() + ADAM_EPS);
            }
            params.set_flat(&theta);
        }
        last_loss = epoch_loss / epoch_weight;
        if !last_loss.is_finite() || params.to_flat().iter().any(|t| !t.is_finite()) {
            return Err(Error::Numerical {
                stage: "epoch",
                index: epoch,
                message: "parameters diverged".into(),
            });
        }
    }
    params.final_loss = last_loss;
    Ok(params)
}
