//! k-fold cross validation of a single learner.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::weighted_accuracy;
use super::split::kfold_partition;
use crate::dataset::EncodedDataset;
use crate::error::{Error, Result};
use crate::learner::{fit, FittedModel, LearnerSpec};
use crate::util::derive_seed;

/// Where sample weights enter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightUsage {
    /// Weighted fitting and weighted metrics.
    #[default]
    FitAndEval,
    /// Unit weights while fitting; weighted metrics.
    EvalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvOptions {
    pub weight_usage: WeightUsage,
    /// Weighted fold accuracy; `false` counts rows.
    pub weighted_accuracy: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            weight_usage: WeightUsage::FitAndEval,
            weighted_accuracy: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
}

impl CvResult {
    pub fn from_accuracies(fold_accuracies: Vec<f64>) -> Self {
        let n = fold_accuracies.len() as f64;
        let mean = fold_accuracies.iter().sum::<f64>() / n;
        let std = if fold_accuracies.len() > 1 {
            (fold_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        CvResult {
            fold_accuracies,
            mean,
            std,
        }
    }
}

/// Fits `spec` with the configured weight usage.
pub fn fit_with(spec: &LearnerSpec, data: &EncodedDataset, usage: WeightUsage) -> Result<FittedModel> {
    match usage {
        WeightUsage::FitAndEval => fit(spec, data),
        WeightUsage::EvalOnly => fit(spec, &data.unweighted()),
    }
}

/// k-fold CV accuracy of `spec` on `train`. Fold `f` fits with seed
/// derived from the spec seed and `f`.
pub fn cross_validate(
    spec: &LearnerSpec,
    train: &EncodedDataset,
    k: usize,
    seed: u64,
    options: CvOptions,
) -> Result<CvResult> {
    let folds = kfold_partition(train.n_samples(), k, seed)?;
    let accuracies = (0..k)
        .into_par_iter()
        .map(|f| {
            let (fit_rows, eval_rows) = folds.split(f);
            debug_assert!(fit_rows.iter().all(|&i| folds.fold_of[i] != f));
            let run = || -> Result<f64> {
                let fit_set = train.subset(&fit_rows)?;
                let eval_set = train.subset(&eval_rows)?;
                let fold_spec = spec.with_seed(derive_seed(spec.seed, &format!("fold/{f}")));
                let model = fit_with(&fold_spec, &fit_set, options.weight_usage)?;
                let pred = model.predict(eval_set.features())?;
                Ok(if options.weighted_accuracy {
                    weighted_accuracy(eval_set.labels(), &pred, eval_set.weights())
                } else {
                    weighted_accuracy(eval_set.labels(), &pred, &vec![1.0; pred.len()])
                })
            };
            run().map_err(|e| Error::Fold {
                fold: f,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CvResult::from_accuracies(accuracies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{Family, Hyperparameters};
    use crate::tree::BoostConfig;

    fn data() -> EncodedDataset {
        let rows: Vec<Vec<f64>> = (0..200).map(|i| vec![(i % 13) as f64, (i % 7) as f64]).collect();
        let labels = (0..200).map(|i| if i % 5 < 3 { 2 } else { i % 2 }).collect();
        EncodedDataset::from_rows(&rows, labels, vec![1.0; 200]).unwrap()
    }

    #[test]
    fn constant_predictor_scores_its_share_per_fold() {
        let d = data();
        let spec = LearnerSpec {
            hyperparameters: Hyperparameters::Boost(BoostConfig {
                n_stages: 0,
                ..BoostConfig::default()
            }),
            seed: 0,
        };
        let folds = kfold_partition(d.n_samples(), 10, 3).unwrap();
        let cv = cross_validate(&spec, &d, 10, 3, CvOptions::default()).unwrap();
        for (f, acc) in cv.fold_accuracies.iter().enumerate() {
            let (_, eval) = folds.split(f);
            let share = eval.iter().filter(|&&i| d.labels()[i] == 2).count() as f64 / eval.len() as f64;
            assert!((acc - share).abs() < 1e-12);
        }
        assert!((cv.mean - 0.6).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_sized() {
        let d = data();
        let spec = LearnerSpec::new(Family::Cart, 1);
        let a = cross_validate(&spec, &d, 10, 5, CvOptions::default()).unwrap();
        let b = cross_validate(&spec, &d, 10, 5, CvOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fold_accuracies.len(), 10);
        assert!(a.std >= 0.0);
    }

    #[test]
    fn fold_errors_name_the_fold() {
        // Each fold of 4 rows has at most 4 training rows; KNN k = 5 must fail.
        let d = data().subset(&(0..5).collect::<Vec<_>>()).unwrap();
        let err = cross_validate(&LearnerSpec::new(Family::Knn, 0), &d, 5, 0, CvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Fold { fold: 0, .. }), "{err}");
    }

    #[test]
    fn sample_std() {
        let r = CvResult::from_accuracies(vec![0.5, 0.7]);
        assert!((r.mean - 0.6).abs() < 1e-15);
        assert!((r.std - 0.02f64.sqrt()).abs() < 1e-15);
    }
}
