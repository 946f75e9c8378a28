//! Run configuration read from TOML.
//!
//! Every key is optional; an empty file yields [`RunConfig::default`], the
//! full experiment design. Unknown keys are rejected with their path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use modechoice::dataset::{SyntheticSpec, N_CLASSES};
use modechoice::eval::{CvOptions, GridSpec, SplitRatio, WeightUsage};
use modechoice::learner::{Family, Hyperparameters, LearnerSpec};
use modechoice::linear::{KnnConfig, MlpConfig, MnlConfig, NbConfig, SvmConfig};
use modechoice::tree::{BaggingConfig, BoostConfig, CartConfig, ForestConfig};

/// Records in the reference survey extract.
pub const DEFAULT_SAMPLE_SIZE: usize = 136_073;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    /// Schema registry TOML; the built-in registry when absent.
    pub schema: Option<PathBuf>,
    pub data: DataConfig,
    pub grid: GridConfig,
    pub hyperparameters: FamilyHyperparameters,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            workers: 1,
            out: PathBuf::from("modechoice-out"),
            schema: None,
            data: DataConfig::default(),
            grid: GridConfig::default(),
            hyperparameters: FamilyHyperparameters::default(),
        }
    }
}

/// Shipment table on disk, or a synthetic draw when `path` is unset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub path: Option<PathBuf>,
    pub synthetic: SyntheticConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_records: usize,
    pub target_mode_shares: [f64; N_CLASSES],
    /// Generator seed; the run's master seed when absent.
    pub seed: Option<u64>,
    pub noise_level: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        let base = SyntheticSpec::default();
        SyntheticConfig {
            n_records: DEFAULT_SAMPLE_SIZE,
            target_mode_shares: base.target_mode_shares,
            seed: None,
            noise_level: base.noise_level,
        }
    }
}

impl SyntheticConfig {
    pub fn spec(&self, master_seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n_records: self.n_records,
            target_mode_shares: self.target_mode_shares,
            seed: self.seed.unwrap_or(master_seed),
            noise_level: self.noise_level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub families: Vec<Family>,
    pub ratios: Vec<f64>,
    pub folds: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    pub stratified: bool,
    pub weight_usage: WeightUsage,
    pub weighted_accuracy: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            families: Family::ALL.to_vec(),
            ratios: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            folds: vec![10, 20, 30],
            sample_sizes: vec![DEFAULT_SAMPLE_SIZE],
            stratified: false,
            weight_usage: WeightUsage::FitAndEval,
            weighted_accuracy: true,
        }
    }
}

/// Per-family hyperparameters; families left out keep their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyHyperparameters {
    #[serde(rename = "MNL")]
    pub mnl: MnlConfig,
    #[serde(rename = "NB")]
    pub nb: NbConfig,
    #[serde(rename = "SVM")]
    pub svm: SvmConfig,
    #[serde(rename = "ANN")]
    pub ann: MlpConfig,
    #[serde(rename = "KNN")]
    pub knn: KnnConfig,
    #[serde(rename = "CART")]
    pub cart: CartConfig,
    #[serde(rename = "RF")]
    pub rf: ForestConfig,
    #[serde(rename = "BOOST")]
    pub boost: BoostConfig,
    #[serde(rename = "BAG")]
    pub bag: BaggingConfig,
}

impl FamilyHyperparameters {
    pub fn for_family(&self, family: Family) -> Hyperparameters {
        match family {
            Family::Mnl => Hyperparameters::Mnl(self.mnl.clone()),
            Family::Nb => Hyperparameters::Nb(self.nb.clone()),
            Family::Svm => Hyperparameters::Svm(self.svm.clone()),
            Family::Ann => Hyperparameters::Ann(self.ann.clone()),
            Family::Knn => Hyperparameters::Knn(self.knn.clone()),
            Family::Cart => Hyperparameters::Cart(self.cart.clone()),
            Family::Rf => Hyperparameters::Rf(self.rf.clone()),
            Family::Boost => Hyperparameters::Boost(self.boost.clone()),
            Family::Bag => Hyperparameters::Bag(self.bag.clone()),
        }
    }

    fn key(family: Family) -> String {
        format!("hyperparameters.{}", family.as_str())
    }
}

/// A configuration problem, tagged with the offending key path.
#[derive(Debug, thiserror::Error)]
#[error("config key `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl ToString) -> Self {
        ConfigError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let de = toml::de::Deserializer::parse(text).map_err(|e| ConfigError::new("<document>", e))?;
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.workers == 0 {
            return Err(ConfigError::new("workers", "must be ≥ 1"));
        }
        let g = &self.grid;
        for (key, empty) in [
            ("grid.families", g.families.is_empty()),
            ("grid.ratios", g.ratios.is_empty()),
            ("grid.folds", g.folds.is_empty()),
            ("grid.sample_sizes", g.sample_sizes.is_empty()),
        ] {
            if empty {
                return Err(ConfigError::new(key, "must not be empty"));
            }
        }
        for (i, &r) in g.ratios.iter().enumerate() {
            SplitRatio::new(r).map_err(|e| ConfigError::new(format!("grid.ratios[{i}]"), e))?;
        }
        if let Some(i) = g.folds.iter().position(|&k| k < 2) {
            return Err(ConfigError::new(format!("grid.folds[{i}]"), "fold count must be ≥ 2"));
        }
        if let Some(i) = g.sample_sizes.iter().position(|&s| s == 0) {
            return Err(ConfigError::new(format!("grid.sample_sizes[{i}]"), "must be positive"));
        }
        if self.data.path.is_none() {
            self.data
                .synthetic
                .spec(self.seed)
                .validate()
                .map_err(|e| ConfigError::new("data.synthetic", e))?;
        }
        for family in Family::ALL {
            self.hyperparameters
                .for_family(family)
                .validate()
                .map_err(|e| ConfigError::new(FamilyHyperparameters::key(family), e))?;
        }
        Ok(())
    }

    pub fn learner(&self, family: Family) -> LearnerSpec {
        LearnerSpec {
            hyperparameters: self.hyperparameters.for_family(family),
            seed: self.seed,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            learners: self.grid.families.iter().map(|&f| self.learner(f)).collect(),
            ratios: self.grid.ratios.clone(),
            folds: self.grid.folds.clone(),
            sample_sizes: self.grid.sample_sizes.clone(),
            master_seed: self.seed,
            cv: CvOptions {
                weight_usage: self.grid.weight_usage,
                weighted_accuracy: self.grid.weighted_accuracy,
            },
            stratified: self.grid.stratified,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.grid.families = vec![Family::Rf, Family::Cart];
        c.hyperparameters.rf.n_trees = 25;
        c.data.path = Some("shipments.csv".into());
        let text = c.to_toml_string();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn bad_ratio_names_the_key() {
        let err = RunConfig::from_toml_str("[grid]\nratios = [0.3, 1.5]\n").unwrap_err();
        assert_eq!(err.path, "grid.ratios[1]");
    }

    #[test]
    fn unknown_key_names_the_path() {
        let err = RunConfig::from_toml_str("[hyperparameters.RF]\ntrees = 5\n").unwrap_err();
        assert_eq!(err.path, "hyperparameters.RF.trees");
        let err = RunConfig::from_toml_str("[grid]\nfamilies = [\"XGB\"]\n").unwrap_err();
        assert!(err.path.starts_with("grid.families"), "{}", err.path);
    }

    #[test]
    fn invalid_hyperparameter_names_the_family() {
        let err = RunConfig::from_toml_str("[hyperparameters.KNN]\nk = 0\n").unwrap_err();
        assert_eq!(err.path, "hyperparameters.KNN");
    }
}
