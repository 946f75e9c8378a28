//! The uniform classifier contract shared by all nine families.
//!
//! A [`LearnerSpec`] names a family, its hyperparameters and a seed; [`fit`]
//! turns it into an immutable [`FittedModel`] that predicts labels and
//! five-column probability rows. Models serialize to versioned JSON.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::linear::{
    fit_gaussian_nb, fit_knn, fit_linear_svm, fit_mlp, fit_mnl, GaussianClassStats, KnnConfig, KnnStore,
    LinearSvmParameters, MlpConfig, MlpParameters, MnlConfig, MnlModel, NbConfig, SvmConfig,
};
use crate::tree::{
    fit_bagging, fit_cart, fit_gradient_boosting, fit_random_forest, impurity_importance, BaggingConfig, BoostConfig,
    BoostedModel, CartConfig, ClassificationTree, ForestConfig, ForestModel,
};
use crate::util::argmax;

/// Version written into every serialized model.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "MNL")]
    Mnl,
    #[serde(rename = "NB")]
    Nb,
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "ANN")]
    Ann,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "CART")]
    Cart,
    #[serde(rename = "RF")]
    Rf,
    #[serde(rename = "BOOST")]
    Boost,
    #[serde(rename = "BAG")]
    Bag,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Mnl,
        Family::Nb,
        Family::Svm,
        Family::Ann,
        Family::Knn,
        Family::Cart,
        Family::Rf,
        Family::Boost,
        Family::Bag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Mnl => "MNL",
            Family::Nb => "NB",
            Family::Svm => "SVM",
            Family::Ann => "ANN",
            Family::Knn => "KNN",
            Family::Cart => "CART",
            Family::Rf => "RF",
            Family::Boost => "BOOST",
            Family::Bag => "BAG",
        }
    }

    pub fn is_tree(self) -> bool {
        matches!(self, Family::Cart | Family::Rf | Family::Boost | Family::Bag)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::validation(format!("unknown classifier family `{s}`")))
    }
}

/// Family tag plus that family's hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "hyperparameters")]
pub enum Hyperparameters {
    #[serde(rename = "MNL")]
    Mnl(MnlConfig),
    #[serde(rename = "NB")]
    Nb(NbConfig),
    #[serde(rename = "SVM")]
    Svm(SvmConfig),
    #[serde(rename = "ANN")]
    Ann(MlpConfig),
    #[serde(rename = "KNN")]
    Knn(KnnConfig),
    #[serde(rename = "CART")]
    Cart(CartConfig),
    #[serde(rename = "RF")]
    Rf(ForestConfig),
    #[serde(rename = "BOOST")]
    Boost(BoostConfig),
    #[serde(rename = "BAG")]
    Bag(BaggingConfig),
}

impl Hyperparameters {
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Mnl => Hyperparameters::Mnl(MnlConfig::default()),
            Family::Nb => Hyperparameters::Nb(NbConfig::default()),
            Family::Svm => Hyperparameters::Svm(SvmConfig::default()),
            Family::Ann => Hyperparameters::Ann(MlpConfig::default()),
            Family::Knn => Hyperparameters::Knn(KnnConfig::default()),
            Family::Cart => Hyperparameters::Cart(CartConfig::default()),
            Family::Rf => Hyperparameters::Rf(ForestConfig::default()),
            Family::Boost => Hyperparameters::Boost(BoostConfig::default()),
            Family::Bag => Hyperparameters::Bag(BaggingConfig::default()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Hyperparameters::Mnl(_) => Family::Mnl,
            Hyperparameters::Nb(_) => Family::Nb,
            Hyperparameters::Svm(_) => Family::Svm,
            Hyperparameters::Ann(_) => Family::Ann,
            Hyperparameters::Knn(_) => Family::Knn,
            Hyperparameters::Cart(_) => Family::Cart,
            Hyperparameters::Rf(_) => Family::Rf,
            Hyperparameters::Boost(_) => Family::Boost,
            Hyperparameters::Bag(_) => Family::Bag,
        }
    }

    /// Checks ranges that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        match self {
            Hyperparameters::Mnl(c) => c.validate(),
            Hyperparameters::Nb(c) => c.validate(),
            Hyperparameters::Svm(c) => c.validate(),
            Hyperparameters::Ann(c) => c.validate(),
            Hyperparameters::Knn(c) => c.validate(),
            Hyperparameters::Cart(c) => c.validate(),
            Hyperparameters::Rf(c) => c.validate(None),
            Hyperparameters::Boost(c) => c.validate(),
            Hyperparameters::Bag(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    #[serde(flatten)]
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl LearnerSpec {
    /// Default hyperparameters for `family`.
    pub fn new(family: Family, seed: u64) -> Self {
        LearnerSpec {
            hyperparameters: Hyperparameters::default_for(family),
            seed,
        }
    }

    pub fn family(&self) -> Family {
        self.hyperparameters.family()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        LearnerSpec {
            hyperparameters: self.hyperparameters.clone(),
            seed,
        }
    }
}

/// Trained parameters of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelParams {
    Mnl(MnlModel),
    Nb(GaussianClassStats),
    Svm(LinearSvmParameters),
    Ann(MlpParameters),
    Knn(KnnStore),
    Cart(ClassificationTree),
    Rf(ForestModel),
    Boost(BoostedModel),
    Bag(ForestModel),
}

/// A trained classifier. Immutable once fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    format_version: u32,
    spec: LearnerSpec,
    feature_count: usize,
    n_samples: usize,
    params: ModelParams,
}

/// Fits `spec` on `data`. Deterministic in `(spec, data)`.
pub fn fit(spec: &LearnerSpec, data: &EncodedDataset) -> Result<FittedModel> {
    spec.hyperparameters.validate()?;
    let seed = spec.seed;
    let params = match &spec.hyperparameters {
        Hyperparameters::Mnl(c) => ModelParams::Mnl(fit_mnl(data, c)?),
        Hyperparameters::Nb(c) => ModelParams::Nb(fit_gaussian_nb(data, c)?),
        Hyperparameters::Svm(c) => ModelParams::Svm(fit_linear_svm(data, c)?),
        Hyperparameters::Ann(c) => ModelParams::Ann(fit_mlp(data, c, seed)?),
        Hyperparameters::Knn(c) => ModelParams::Knn(fit_knn(data, c)?),
        Hyperparameters::Cart(c) => ModelParams::Cart(fit_cart(data, c)?),
        Hyperparameters::Rf(c) => ModelParams::Rf(fit_random_forest(data, c, seed)?),
        Hyperparameters::Boost(c) => ModelParams::Boost(fit_gradient_boosting(data, c)?),
        Hyperparameters::Bag(c) => ModelParams::Bag(fit_bagging(data, c, seed)?),
    };
    Ok(FittedModel {
        format_version: FORMAT_VERSION,
        spec: spec.clone(),
        feature_count: data.n_features(),
        n_samples: data.n_samples(),
        params,
    })
}

impl FittedModel {
    pub fn family(&self) -> Family {
        self.spec.family()
    }

    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn class_count(&self) -> usize {
        N_CLASSES
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    /// Convergence flag for families that iterate to a tolerance.
    pub fn converged(&self) -> Option<bool> {
        match &self.params {
            ModelParams::Mnl(m) => Some(m.converged),
            _ => None,
        }
    }

    fn check_shape(&self, x: ArrayView2<'_, f64>) -> Result<()> {
        if x.ncols() != self.feature_count {
            return Err(Error::Shape {
                what: "columns",
                expected: self.feature_count,
                found: x.ncols(),
            });
        }
        Ok(())
    }

    /// `M × 5` row-stochastic class probabilities.
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_shape(x)?;
        Ok(match &self.params {
            ModelParams::Mnl(m) => m.predict_proba(x),
            ModelParams::Nb(m) => m.predict_proba(x),
            ModelParams::Svm(m) => m.predict_proba(x),
            ModelParams::Ann(m) => m.predict_proba(x),
            ModelParams::Knn(m) => m.predict_proba(x),
            ModelParams::Cart(m) => m.predict_proba(x),
            ModelParams::Rf(m) | ModelParams::Bag(m) => m.predict_proba(x),
            ModelParams::Boost(m) => m.predict_proba(x),
        })
    }

    /// Row-wise argmax of [`predict_proba`](Self::predict_proba), ties to the lowest class.
    ///
    /// The SVM predicts from its decision values directly; its softmax
    /// surrogate has the same argmax.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        if let ModelParams::Svm(m) = &self.params {
            self.check_shape(x)?;
            return Ok(x.rows().into_iter().map(|r| argmax(&m.decision_values(r))).collect());
        }
        let p = self.predict_proba(x)?;
        Ok(p.rows()
            .into_iter()
            .map(|r| argmax(r.as_slice().expect("standard layout")))
            .collect())
    }

    /// Normalized impurity importance; only tree families have one.
    pub fn importance(&self) -> Result<Vec<f64>> {
        let d = self.feature_count;
        Ok(match &self.params {
            ModelParams::Cart(t) => impurity_importance([(&t.impurity_decrease[..], t.root_weight)], d),
            ModelParams::Rf(f) | ModelParams::Bag(f) => {
                impurity_importance(f.trees.iter().map(|t| (&t.impurity_decrease[..], t.root_weight)), d)
            }
            ModelParams::Boost(b) => {
                impurity_importance(b.trees().map(|t| (&t.impurity_decrease[..], t.root_weight)), d)
            }
            _ => {
                return Err(Error::Type(format!(
                    "{} is not a tree model and has no impurity importance",
                    self.family()
                )))
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                header.format_version
            )));
        }
        let model: FittedModel = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if model.spec.family().as_str() != model.params_family().as_str() {
            return Err(Error::Format("family tag does not match the stored parameters".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn params_family(&self) -> Family {
        match self.params {
            ModelParams::Mnl(_) => Family::Mnl,
            ModelParams::Nb(_) => Family::Nb,
            ModelParams::Svm(_) => Family::Svm,
            ModelParams::Ann(_) => Family::Ann,
            ModelParams::Knn(_) => Family::Knn,
            ModelParams::Cart(_) => Family::Cart,
            ModelParams::Rf(_) => Family::Rf,
            ModelParams::Boost(_) => Family::Boost,
            ModelParams::Bag(_) => Family::Bag,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> EncodedDataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 8) as f64, (i / 8) as f64, ((i * 3) % 5) as f64])
            .collect();
        let labels = (0..40).map(|i| [0, 1, 2, 4][(i % 8) / 2]).collect();
        let weights = (0..40).map(|i| 1.0 + (i % 3) as f64).collect();
        EncodedDataset::from_rows(&rows, labels, weights).unwrap()
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
            assert_eq!(Hyperparameters::default_for(f).family(), f);
        }
        assert!("XGB".parse::<Family>().is_err());
    }

    #[test]
    fn knn_k0_is_invalid() {
        let spec = LearnerSpec {
            hyperparameters: Hyperparameters::Knn(KnnConfig { k: 0 }),
            seed: 0,
        };
        assert!(matches!(fit(&spec, &toy()), Err(Error::Validation(_))));
    }

    #[test]
    fn every_family_fits_predicts_and_reloads() {
        let data = toy();
        for f in Family::ALL {
            let mut spec = LearnerSpec::new(f, 11);
            if let Hyperparameters::Ann(c) = &mut spec.hyperparameters {
                c.epochs = 5;
            }
            let model = fit(&spec, &data).unwrap();
            assert_eq!(model.family(), f);
            let p = model.predict_proba(data.features()).unwrap();
            for row in p.rows() {
                assert!((row.sum() - 1.0).abs() < 1e-9, "{f}");
                assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
            }
            let labels = model.predict(data.features()).unwrap();
            for (l, row) in labels.iter().zip(p.rows()) {
                assert_eq!(*l, argmax(row.as_slice().unwrap()), "{f}");
            }
            let back = FittedModel::from_json(&model.to_json().unwrap()).unwrap();
            assert_eq!(back.predict_proba(data.features()).unwrap(), p, "{f}");
            assert_eq!(model.importance().is_ok(), f.is_tree());
        }
    }

    #[test]
    fn shape_and_empty_input() {
        let data = toy();
        let model = fit(&LearnerSpec::new(Family::Cart, 0), &data).unwrap();
        let bad = Array2::zeros((2, 4));
        assert!(matches!(model.predict(bad.view()), Err(Error::Shape { .. })));
        let empty = Array2::zeros((0, 3));
        assert!(model.predict(empty.view()).unwrap().is_empty());
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let model = fit(&LearnerSpec::new(Family::Nb, 0), &toy()).unwrap();
        let text = model
            .to_json()
            .unwrap()
            .replacen("\"format_version\":1", "\"format_version\":9", 1);
        assert!(matches!(FittedModel::from_json(&text), Err(Error::Format(_))));
    }
}
