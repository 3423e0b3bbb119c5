//! Label-free spectral baselines run on all available vectors.

use super::{check_k, finish, Aux, EstimatorOutput, Method, SpectralOptions};
use crate::error::Result;
use crate::gmodel::ceil_count;
use crate::matrix::Rows;
use crate::select::{top_k_by_magnitude, top_k_by_value};
use crate::spectral::{
    canonicalize, column_variances, leading_eigenvector, restricted_covariance_with, CovarianceForm,
};

/// `⌈k ln p⌉`, clamped to `[k, p]`.
pub fn ul_screening_size(p: usize, k: usize) -> usize {
    ceil_count(k as f64 * (p as f64).ln()).clamp(k, p)
}

/// Keeps the highest-variance coordinates, takes the leading eigenvector of
/// the covariance there, and re-solves on its `k` largest entries.
pub fn ul_diag_threshold_pca(rows: Rows<'_>, k: usize, opts: &SpectralOptions) -> Result<EstimatorOutput> {
    let p = rows.cols();
    check_k(p, k)?;
    let count = ul_screening_size(p, k);
    let variances = column_variances(rows, opts.exec);
    let screened = top_k_by_value(&variances, count);
    let cov = restricted_covariance_with(rows, &screened, opts.form, opts.exec)?;
    let first = leading_eigenvector(&cov, &opts.eigen)?;
    let support: Vec<usize> = top_k_by_magnitude(&first.vector, k)
        .into_iter()
        .map(|t| screened[t])
        .collect();
    let block = restricted_covariance_with(rows, &support, opts.form, opts.exec)?;
    let second = leading_eigenvector(&block, &opts.eigen)?;
    let mut values = vec![0.0; p];
    for (&j, &v) in support.iter().zip(&second.vector) {
        values[j] = v;
    }
    let aux = Aux {
        screened: Some(count),
        iterations: Some(first.iterations + second.iterations),
        ..Aux::default()
    };
    Ok(finish(Method::UlDiagPca, p, support, &values, aux))
}

/// Leading eigenvector of the full covariance (always applied implicitly),
/// truncated to its `k` largest entries.
pub fn vanilla_pca(rows: Rows<'_>, k: usize, opts: &SpectralOptions) -> Result<EstimatorOutput> {
    let p = rows.cols();
    check_k(p, k)?;
    let all: Vec<usize> = (0..p).collect();
    let cov = restricted_covariance_with(rows, &all, CovarianceForm::Implicit, opts.exec)?;
    let pair = leading_eigenvector(&cov, &opts.eigen)?;
    let support = top_k_by_magnitude(&pair.vector, k);
    let mut values = vec![0.0; p];
    for &j in &support {
        values[j] = pair.vector[j];
    }
    canonicalize(&mut values);
    let aux = Aux {
        iterations: Some(pair.iterations),
        ..Aux::default()
    };
    Ok(finish(Method::VanillaPca, p, support, &values, aux))
}
