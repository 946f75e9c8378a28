//! The experiment grid: learners × split ratios × fold counts × sample sizes.
//!
//! Every cell subsamples the data, makes a holdout split, cross-validates on
//! the training part, refits on the whole training part and scores the test
//! part. Seeds come from the master seed and the cell key. Data seeds leave
//! the learner out of the key, so all learners in a (ratio, folds, size)
//! slice see the same subsample, split and folds.

use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, fit_with, CvOptions, CvResult};
use super::metrics::{compute_metrics, MetricsReport};
use super::split::{holdout_indices, SplitRatio};
use crate::dataset::EncodedDataset;
use crate::error::{Error, Result};
use crate::learner::{Family, FittedModel, LearnerSpec};
use crate::util::{derive_seed, rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// One entry per learner; the seed field is replaced per cell.
    pub learners: Vec<LearnerSpec>,
    pub ratios: Vec<f64>,
    pub folds: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    pub master_seed: u64,
    pub cv: CvOptions,
    pub stratified: bool,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.learners.is_empty() || self.ratios.is_empty() || self.folds.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::validation(
                "grid needs at least one learner, ratio, fold count and sample size",
            ));
        }
        for l in &self.learners {
            l.hyperparameters.validate()?;
        }
        for &r in &self.ratios {
            SplitRatio::new(r)?;
        }
        if let Some(k) = self.folds.iter().find(|&&k| k < 2) {
            return Err(Error::validation(format!("fold count {k} must be ≥ 2")));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::validation("sample sizes must be positive"));
        }
        Ok(())
    }

    /// Cells in grid order: size, then ratio, then folds, then learner.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for &sample_size in &self.sample_sizes {
            for &ratio in &self.ratios {
                for &folds in &self.folds {
                    for learner in 0..self.learners.len() {
                        out.push(CellKey {
                            index: out.len(),
                            learner,
                            family: self.learners[learner].family(),
                            ratio,
                            folds,
                            sample_size,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    /// Position in grid order.
    pub index: usize,
    /// Index into `GridSpec::learners`.
    pub learner: usize,
    pub family: Family,
    pub ratio: f64,
    pub folds: usize,
    pub sample_size: usize,
}

impl CellKey {
    fn data_tag(&self) -> String {
        format!("data/{}/{}", self.ratio, self.sample_size)
    }

    fn fold_tag(&self) -> String {
        format!("folds/{}/{}/{}", self.ratio, self.folds, self.sample_size)
    }

    fn model_tag(&self) -> String {
        format!(
            "model/{}/{}/{}/{}/{}",
            self.learner, self.family, self.ratio, self.folds, self.sample_size
        )
    }
}

/// One finished cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub key: CellKey,
    pub seed: u64,
    pub cv: Option<CvResult>,
    pub test: Option<MetricsReport>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

/// A row plus the model refitted on the cell's training part.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub row: GridRow,
    pub model: Option<FittedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGridResult {
    pub rows: Vec<GridRow>,
}

impl ExperimentGridResult {
    pub fn n_errors(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn subsample(n: usize, size: usize, seed: u64) -> Result<Vec<usize>> {
    if size > n {
        return Err(Error::validation(format!(
            "sample size {size} exceeds the {n} available rows"
        )));
    }
    let mut idx = rand::seq::index::sample(&mut rng(seed), n, size).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Runs one cell.
pub fn run_cell(spec: &GridSpec, key: CellKey, data: &EncodedDataset) -> CellOutcome {
    let start = Instant::now();
    let seed = derive_seed(spec.master_seed, &key.model_tag());
    let result = (|| -> Result<(CvResult, MetricsReport, FittedModel)> {
        let rows = subsample(
            data.n_samples(),
            key.sample_size,
            derive_seed(spec.master_seed, &format!("{}/subsample", key.data_tag())),
        )?;
        let sample = data.subset(&rows)?;
        let strata = spec.stratified.then(|| sample.labels());
        let (train_idx, test_idx) = holdout_indices(
            sample.n_samples(),
            SplitRatio::new(key.ratio)?,
            derive_seed(spec.master_seed, &format!("{}/holdout", key.data_tag())),
            strata,
        )?;
        let train = sample.subset(&train_idx)?;
        let test = sample.subset(&test_idx)?;
        let learner = spec.learners[key.learner].with_seed(seed);
        let cv = cross_validate(
            &learner,
            &train,
            key.folds,
            derive_seed(spec.master_seed, &key.fold_tag()),
            spec.cv,
        )?;
        let model = fit_with(&learner, &train, spec.cv.weight_usage)?;
        let pred = model.predict(test.features())?;
        let metrics = compute_metrics(test.labels(), &pred, test.weights())?;
        Ok((cv, metrics, model))
    })();
    let wall_time_s = start.elapsed().as_secs_f64();
    match result {
        Ok((cv, test, model)) => CellOutcome {
            row: GridRow {
                key,
                seed,
                cv: Some(cv),
                test: Some(test),
                error: None,
                wall_time_s,
            },
            model: Some(model),
        },
        Err(e) => CellOutcome {
            row: GridRow {
                key,
                seed,
                cv: None,
                test: None,
                error: Some(e.to_string()),
                wall_time_s,
            },
            model: None,
        },
    }
}

/// Runs every cell on up to `workers` threads. `sink` sees each cell as it
/// completes, one call at a time; the returned rows are in grid order.
pub fn run_experiment_grid<F>(
    spec: &GridSpec,
    data: &EncodedDataset,
    workers: usize,
    sink: F,
) -> Result<ExperimentGridResult>
where
    F: FnMut(&CellOutcome) + Send,
{
    spec.validate()?;
    let cells = spec.cells();
    let sink = Mutex::new(sink);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::validation(format!("worker pool: {e}")))?;
    let mut rows: Vec<GridRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&key| {
                let outcome = run_cell(spec, key, data);
                (sink.lock().expect("sink poisoned"))(&outcome);
                outcome.row
            })
            .collect()
    });
    rows.sort_by_key(|r| r.key.index);
    Ok(ExperimentGridResult { rows })
}
