//! Freight mode-choice classifiers and the weighted evaluation protocol used
//! to compare them.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`]: shipment records, banding, encoding and a synthetic generator;
//! * [`learner`]: the uniform fit / predict / predict-probability contract;
//! * [`linear`]: multinomial logit, Gaussian naive Bayes, k-nearest
//!   neighbours, one-vs-rest linear SVM and a one-hidden-layer perceptron;
//! * [`tree`]: CART, random forest, bagging, gradient boosting and impurity
//!   importance;
//! * [`eval`]: holdout and k-fold splitting, weighted metrics and the
//!   experiment grid.
//!
//! A longer walk-through lives in the guide (`book/`), whose code listings are
//! compiled as doc-tests of the [`guide`] module.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod learner;
pub mod linear;
pub mod tree;

pub mod guide;

pub(crate) mod util;

pub use util::derive_seed;

pub use error::{Error, Result};
