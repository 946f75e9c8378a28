//! Tree learners: CART, random forest, bagging and gradient boosting.

mod binned;
pub mod boosting;
mod builder;
pub mod cart;
pub mod forest;
pub mod importance;

pub use boosting::{fit_gradient_boosting, BoostConfig, BoostedModel, RegressionTree};
pub use builder::{Node, MIN_DECREASE, TIE_EPS};
pub use cart::{best_split, fit_cart, CartConfig, ClassificationTree, Split};
pub use forest::{
    bootstrap_counts, fit_bagging, fit_random_forest, BaggingConfig, BootstrapMode, ForestConfig, ForestModel,
};
pub use importance::impurity_importance;
