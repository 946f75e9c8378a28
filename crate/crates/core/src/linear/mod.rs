//! The five non-tree classifiers.

pub mod knn;
pub mod mlp;
pub mod mnl;
pub mod naive_bayes;
mod optim;
pub mod svm;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::dataset::N_CLASSES;
pub use crate::util::Standardizer;

pub use knn::{fit_knn, KnnConfig, KnnStore};
pub use mlp::{fit_mlp, MlpConfig, MlpParameters};
pub use mnl::{fit_mnl, MnlConfig, MnlModel};
pub use naive_bayes::{fit_gaussian_nb, GaussianClassStats, NbConfig};
pub use svm::{fit_linear_svm, LinearSvmParameters, SvmConfig};

pub(crate) fn rows_to_proba<F>(x: ArrayView2<'_, f64>, f: F) -> Array2<f64>
where
    F: Fn(ArrayView1<'_, f64>) -> [f64; N_CLASSES],
{
    let mut out = Array2::zeros((x.nrows(), N_CLASSES));
    for (i, row) in x.rows().into_iter().enumerate() {
        let p = f(row);
        out.row_mut(i).iter_mut().zip(&p).for_each(|(o, v)| *o = *v);
    }
    out
}
