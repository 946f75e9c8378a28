//! Tabular output of grid results.
//!
//! The results table leaves wall time out so that reruns with the same seed
//! are byte-identical; timings go to their own table. Undefined precision,
//! recall and F1 are written as `NA`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::grid::GridRow;
use crate::dataset::{ModeClass, N_CLASSES};
use crate::error::{Error, Result};

/// Marker for undefined metric values.
pub const UNDEFINED: &str = "NA";

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), num)
}

fn joined(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(";")
}

/// Column names of the results table.
pub fn results_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "cell",
        "family",
        "ratio",
        "folds",
        "sample_size",
        "seed",
        "status",
        "cv_mean",
        "cv_std",
        "cv_fold_accuracies",
        "test_accuracy",
    ]
    .map(String::from)
    .to_vec();
    for metric in ["precision", "recall", "f1", "support"] {
        for m in ModeClass::ALL {
            h.push(format!("{metric}_{}", m.id()));
        }
    }
    h.push("confusion".into());
    h.push("error".into());
    h
}

fn results_record(row: &GridRow) -> Vec<String> {
    let k = &row.key;
    let mut r = vec![
        k.index.to_string(),
        k.family.to_string(),
        num(k.ratio),
        k.folds.to_string(),
        k.sample_size.to_string(),
        row.seed.to_string(),
        if row.error.is_some() { "error" } else { "ok" }.to_string(),
    ];
    match &row.cv {
        Some(cv) => r.extend([num(cv.mean), num(cv.std), joined(cv.fold_accuracies.iter().copied())]),
        None => r.extend(std::iter::repeat_n(String::new(), 3)),
    }
    match &row.test {
        Some(t) => {
            r.push(num(t.accuracy));
            r.extend((0..N_CLASSES).map(|c| {
                if t.precision_undefined[c] {
                    UNDEFINED.to_string()
                } else {
                    num(t.precision[c])
                }
            }));
            r.extend(t.recall.iter().map(|v| opt(*v)));
            r.extend(t.f1.iter().map(|v| opt(*v)));
            r.extend(t.support.iter().map(|v| num(*v)));
            r.push(joined(t.confusion.flatten()));
        }
        None => r.extend(std::iter::repeat_n(String::new(), 1 + 4 * N_CLASSES + 1)),
    }
    r.push(row.error.clone().unwrap_or_default());
    r
}

pub fn write_results_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(results_header())?;
    for row in rows {
        w.write_record(results_record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per cell, wall time excluded.
pub fn write_results_jsonl<W: Write>(rows: &[GridRow], mut out: W) -> Result<()> {
    for row in rows {
        let record = ResultRecord::from(row);
        serde_json::to_writer(&mut out, &record).map_err(|e| Error::Format(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_timings_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell", "family", "wall_time_s"])?;
    for row in rows {
        w.write_record([
            row.key.index.to_string(),
            row.key.family.to_string(),
            num(row.wall_time_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The serialized form of a grid row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub key: super::grid::CellKey,
    pub seed: u64,
    pub cv: Option<super::cv::CvResult>,
    pub test: Option<super::metrics::MetricsReport>,
    pub error: Option<String>,
}

impl From<&GridRow> for ResultRecord {
    fn from(r: &GridRow) -> Self {
        ResultRecord {
            key: r.key,
            seed: r.seed,
            cv: r.cv.clone(),
            test: r.test.clone(),
            error: r.error.clone(),
        }
    }
}

impl ResultRecord {
    pub fn into_row(self) -> GridRow {
        GridRow {
            key: self.key,
            seed: self.seed,
            cv: self.cv,
            test: self.test,
            error: self.error,
            wall_time_s: 0.0,
        }
    }
}

pub fn read_results_jsonl(text: &str) -> Result<Vec<GridRow>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str::<ResultRecord>(l)
                .map(ResultRecord::into_row)
                .map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Per-fold CV accuracies by family and ratio (box-plot data).
pub fn write_accuracy_by_ratio<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "ratio", "folds", "sample_size", "fold", "cv_accuracy"])?;
    for row in rows {
        if let Some(cv) = &row.cv {
            for (f, a) in cv.fold_accuracies.iter().enumerate() {
                let k = &row.key;
                w.write_record([
                    k.family.to_string(),
                    num(k.ratio),
                    k.folds.to_string(),
                    k.sample_size.to_string(),
                    f.to_string(),
                    num(*a),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// (family, sample size) and the running (CV sum, test sum, count).
type SizeGroup = ((String, usize), (f64, f64, usize));

/// Mean CV and test accuracy by family and sample size, averaged over ratios
/// and fold counts.
pub fn write_accuracy_by_size<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut groups: Vec<SizeGroup> = Vec::new();
    for row in rows {
        let (Some(cv), Some(t)) = (&row.cv, &row.test) else {
            continue;
        };
        let key = (row.key.family.to_string(), row.key.sample_size);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => {
                acc.0 += cv.mean;
                acc.1 += t.accuracy;
                acc.2 += 1;
            }
            None => groups.push((key, (cv.mean, t.accuracy, 1))),
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "sample_size",
        "cells",
        "mean_cv_accuracy",
        "mean_test_accuracy",
    ])?;
    for ((family, size), (cv, test, n)) in groups {
        let n_f = n as f64;
        w.write_record([family, size.to_string(), n.to_string(), num(cv / n_f), num(test / n_f)])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-mode precision, recall and F1 of every successful cell.
pub fn write_per_mode_metrics<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "ratio",
        "folds",
        "sample_size",
        "mode",
        "precision",
        "recall",
        "f1",
        "support",
    ])?;
    for row in rows {
        let Some(t) = &row.test else { continue };
        let k = &row.key;
        for m in ModeClass::ALL {
            let c = m.code();
            w.write_record([
                k.family.to_string(),
                num(k.ratio),
                k.folds.to_string(),
                k.sample_size.to_string(),
                m.id().to_string(),
                if t.precision_undefined[c] {
                    UNDEFINED.to_string()
                } else {
                    num(t.precision[c])
                },
                opt(t.recall[c]),
                opt(t.f1[c]),
                num(t.support[c]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::EncodedDataset;
    use crate::eval::{run_experiment_grid, CvOptions, GridSpec};
    use crate::learner::{Family, LearnerSpec};

    fn rows() -> Vec<GridRow> {
        let x: Vec<Vec<f64>> = (0..80).map(|i| vec![(i % 9) as f64]).collect();
        let y = (0..80).map(|i| (i % 9) / 3).collect();
        let data = EncodedDataset::from_rows(&x, y, vec![1.0; 80]).unwrap();
        let spec = GridSpec {
            learners: vec![LearnerSpec::new(Family::Cart, 0)],
            ratios: vec![0.25],
            folds: vec![4],
            sample_sizes: vec![60, 100],
            master_seed: 9,
            cv: CvOptions::default(),
            stratified: false,
        };
        run_experiment_grid(&spec, &data, 1, |_| {}).unwrap().rows
    }

    #[test]
    fn csv_has_one_line_per_row_and_marks_errors() {
        let rows = rows();
        let mut buf = Vec::new();
        write_results_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].contains(",error,"));
        assert!(lines[1].contains(UNDEFINED));
        let n_cols = results_header().len();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for rec in rdr.records() {
            assert_eq!(rec.unwrap().len(), n_cols);
        }
    }

    #[test]
    fn jsonl_round_trips() {
        let rows = rows();
        let mut buf = Vec::new();
        write_results_jsonl(&rows, &mut buf).unwrap();
        let back = read_results_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(ResultRecord::from(a), ResultRecord::from(b));
        }
    }
}
