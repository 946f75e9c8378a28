use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::binning::BinningScheme;
use super::record::ShipmentRecord;
use super::schema::{ModeClass, N_CLASSES};
use crate::error::{Error, Result};

/// Encoded feature names under the default schema, in column order.
pub const FEATURE_NAMES: [&str; 20] = [
    "size_band",
    "value_band",
    "distance_band",
    "commodity",
    "hazmat",
    "temp_controlled",
    "export",
    "origin_cfs",
    "dest_cfs",
    "naics",
    "origin_employee_density",
    "origin_warehouse_count",
    "origin_highway_density",
    "origin_railway_density",
    "origin_temp_over_60f",
    "dest_population_density",
    "dest_income_under_50k",
    "dest_temp_over_60f",
    "dest_highway_density",
    "dest_railway_density",
];

/// Numeric classifier input: features, class labels in `0..5`, positive weights.
///
/// Immutable once built; every constructor validates the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedDataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    weights: Vec<f64>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl EncodedDataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        weights: Vec<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if labels.len() != n || weights.len() != n {
            return Err(Error::Data(format!(
                "{n} feature rows but {} labels and {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::Data(format!(
                "{d} feature columns but {} names",
                feature_names.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y >= N_CLASSES) {
            return Err(Error::Data(format!("row {i}: label {} out of range", labels[i])));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Data(format!("row {i}: weight {} is not positive", weights[i])));
        }
        if let Some(((i, j), x)) = features.indexed_iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Data(format!("row {i}, column {j}: non-finite value {x}")));
        }
        Ok(EncodedDataset {
            features,
            labels,
            weights,
            feature_names,
            class_names: ModeClass::class_names(),
        })
    }

    /// Convenience constructor with generated feature names `x0, x1, …`.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Data("ragged feature rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let features = Array2::from_shape_vec((rows.len(), d), flat).map_err(|e| Error::Data(e.to_string()))?;
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Self::new(features, labels, weights, names)
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Total weight per class.
    pub fn class_weights(&self) -> [f64; N_CLASSES] {
        let mut totals = [0.0; N_CLASSES];
        for (&y, &w) in self.labels.iter().zip(&self.weights) {
            totals[y] += w;
        }
        totals
    }

    /// Classes with at least one training row.
    pub fn present_classes(&self) -> [bool; N_CLASSES] {
        let mut present = [false; N_CLASSES];
        for &y in &self.labels {
            present[y] = true;
        }
        present
    }

    /// Weighted share of each mode; sums to one.
    pub fn weighted_mode_shares(&self) -> [f64; N_CLASSES] {
        let totals = self.class_weights();
        let sum: f64 = totals.iter().sum();
        totals.map(|t| t / sum)
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select(Axis(0), indices);
        EncodedDataset::new(
            features,
            indices.iter().map(|&i| self.labels[i]).collect(),
            indices.iter().map(|&i| self.weights[i]).collect(),
            self.feature_names.clone(),
        )
    }

    /// Same rows with replacement weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        EncodedDataset::new(
            self.features.clone(),
            self.labels.clone(),
            weights,
            self.feature_names.clone(),
        )
    }

    /// Same rows with every weight set to one.
    pub fn unweighted(&self) -> Self {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w = 1.0);
        out
    }
}

/// Bands size/value/distance, integer-codes categoricals in registry order,
/// and passes the spatial densities through unchanged.
pub fn encode_dataset(records: &[ShipmentRecord], scheme: &BinningScheme) -> Result<EncodedDataset> {
    if records.is_empty() {
        return Err(Error::Data("cannot encode an empty record list".into()));
    }
    scheme.validate()?;
    let d = FEATURE_NAMES.len();
    let mut flat = Vec::with_capacity(records.len() * d);
    for r in records {
        let bands = scheme.bands(r.size_lb, r.value_usd, r.distance_mi);
        flat.extend_from_slice(&[
            bands.size_band as f64,
            bands.value_band as f64,
            bands.distance_band as f64,
            r.commodity as f64,
            r.hazmat as f64,
            flag(r.temp_controlled),
            flag(r.export),
            r.origin_cfs as f64,
            r.dest_cfs as f64,
            r.naics as f64,
            r.origin_employee_density,
            f64::from(r.origin_warehouse_count),
            r.origin_highway_density,
            r.origin_railway_density,
            flag(r.origin_temp_over_60f),
            r.dest_population_density,
            flag(r.dest_income_under_50k),
            flag(r.dest_temp_over_60f),
            r.dest_highway_density,
            r.dest_railway_density,
        ]);
    }
    let features = Array2::from_shape_vec((records.len(), d), flat).map_err(|e| Error::Data(e.to_string()))?;
    EncodedDataset::new(
        features,
        records.iter().map(|r| r.mode.code()).collect(),
        records.iter().map(|r| r.weight).collect(),
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    )
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn sample_record() -> ShipmentRecord {
        ShipmentRecord {
            mode: ModeClass::Parcel,
            size_lb: 150.0,
            value_usd: 420.0,
            distance_mi: 999.0,
            commodity: 7,
            hazmat: 2,
            temp_controlled: false,
            export: true,
            origin_cfs: 3,
            dest_cfs: 40,
            naics: 17,
            origin_employee_density: 12.5,
            origin_warehouse_count: 4,
            origin_highway_density: 1.25,
            origin_railway_density: 0.3,
            origin_temp_over_60f: true,
            dest_population_density: 0.8,
            dest_income_under_50k: false,
            dest_temp_over_60f: true,
            dest_highway_density: 1.1,
            dest_railway_density: 0.2,
            weight: 2.5,
        }
    }

    #[test]
    fn one_record_gives_twenty_features() {
        let ds = encode_dataset(&[sample_record()], &BinningScheme::default()).unwrap();
        assert_eq!(ds.features().dim(), (1, 20));
        assert_eq!(ds.feature_names().len(), 20);
        let size_col = ds.feature_names().iter().position(|n| n == "size_band").unwrap();
        assert_eq!(ds.row(0)[size_col], 1.0);
        assert_eq!(ds.row(0)[2], 4.0);
        assert_eq!(ds.row(0)[10], 12.5);
        assert_eq!(ds.labels(), &[2]);
        assert_eq!(ds.weights(), &[2.5]);
    }

    #[test]
    fn mode_only_differences_give_equal_rows() {
        let a = sample_record();
        let mut b = a.clone();
        b.mode = ModeClass::Air;
        let ds = encode_dataset(&[a, b], &BinningScheme::default()).unwrap();
        assert_eq!(ds.row(0), ds.row(1));
        assert_ne!(ds.labels()[0], ds.labels()[1]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(encode_dataset(&[], &BinningScheme::default()).is_err());
    }

    #[test]
    fn weighted_shares() {
        let ds = EncodedDataset::from_rows(&[vec![0.0], vec![1.0]], vec![0, 1], vec![1.0, 3.0]).unwrap();
        let s = ds.weighted_mode_shares();
        assert_abs_diff_eq!(s[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 0.75, epsilon = 1e-15);
        assert_eq!(&s[2..], &[0.0, 0.0, 0.0]);

        let single = EncodedDataset::from_rows(&[vec![0.0], vec![1.0]], vec![3, 3], vec![0.5, 9.0]).unwrap();
        assert_eq!(single.weighted_mode_shares(), [0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn constructor_rejects_bad_rows() {
        assert!(EncodedDataset::from_rows(&[vec![0.0]], vec![5], vec![1.0]).is_err());
        assert!(EncodedDataset::from_rows(&[vec![0.0]], vec![0], vec![0.0]).is_err());
        assert!(EncodedDataset::from_rows(&[vec![f64::NAN]], vec![0], vec![1.0]).is_err());
        assert!(EncodedDataset::from_rows(&[], vec![], vec![]).is_err());
    }
}
