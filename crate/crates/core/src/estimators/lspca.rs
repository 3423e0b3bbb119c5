//! Screening by the labeled class-mean difference followed by PCA of the
//! unlabeled covariance on the retained coordinates (LSPCA), or sparse PCA
//! via the truncated power method (LS²PCA).

use super::{check_k, finish, labeled_direction, Aux, EstimatorOutput, Method, SpectralOptions};
use crate::error::{Error, Result};
use crate::gmodel::{ceil_count, Dataset, Exponents};
use crate::select::top_k_by_magnitude;
use crate::spectral::{
    dot, leading_eigenvector, restricted_covariance_with, truncated_power_method,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LspcaConfig {
    pub k: usize,
    /// Screening exponent in `(0, 1)`; `⌈p^{1−β̃}⌉` coordinates are kept.
    pub beta_tilde: f64,
    /// Use the truncated power method on the screened block (LS²PCA).
    pub sparse_pca: bool,
}

impl LspcaConfig {
    pub fn validate(&self, p: usize) -> Result<usize> {
        if !(self.beta_tilde > 0.0 && self.beta_tilde < 1.0) {
            return Err(Error::InvalidParams(format!(
                "beta_tilde must lie in (0, 1), got {}",
                self.beta_tilde
            )));
        }
        check_k(p, self.k)?;
        let retained = screening_size(p, self.beta_tilde);
        if retained < self.k {
            return Err(Error::ScreeningTooSmall { retained, k: self.k });
        }
        Ok(retained)
    }
}

/// `⌈p^{1−β̃}⌉`, capped at `p`.
pub fn screening_size(p: usize, beta_tilde: f64) -> usize {
    ceil_count((p as f64).powf(1.0 - beta_tilde)).min(p)
}

/// `β̃ = β − (β − (1 − γα))/4`, three quarters of the way from the
/// unlabeled detection boundary `1 − γα` to the labeled exponent `β`.
pub fn auto_beta_tilde(exps: Exponents) -> Result<f64> {
    let Exponents { alpha, beta, gamma } = exps;
    let bt = beta - (beta - (1.0 - gamma * alpha)) / 4.0;
    if !(bt > 0.0 && bt < 1.0) {
        return Err(Error::InvalidParams(format!(
            "automatic beta_tilde = {bt} outside (0, 1) for α = {alpha}, β = {beta}, γ = {gamma}"
        )));
    }
    Ok(bt)
}

pub fn lspca(data: &Dataset, cfg: &LspcaConfig, opts: &SpectralOptions) -> Result<EstimatorOutput> {
    let p = data.p();
    let retained = cfg.validate(p)?;
    let w = labeled_direction(data)?;
    let screened = top_k_by_magnitude(&w, retained);
    let rows = data.unlabeled();
    let cov = restricted_covariance_with(rows, &screened, opts.form, opts.exec)?;

    let (method, support, mut values, iterations) = if cfg.sparse_pca {
        let sparse = truncated_power_method(&cov, cfg.k, &opts.eigen)?;
        let support: Vec<usize> = sparse.support.iter().map(|&t| screened[t]).collect();
        (Method::Ls2pca, support, embed(p, &screened, &sparse.vector), sparse.iterations)
    } else {
        let first = leading_eigenvector(&cov, &opts.eigen)?;
        let support: Vec<usize> = top_k_by_magnitude(&first.vector, cfg.k)
            .into_iter()
            .map(|t| screened[t])
            .collect();
        let block = restricted_covariance_with(rows, &support, opts.form, opts.exec)?;
        let second = leading_eigenvector(&block, &opts.eigen)?;
        (
            Method::Lspca,
            support.clone(),
            embed(p, &support, &second.vector),
            first.iterations + second.iterations,
        )
    };

    if dot(&values, &w) < 0.0 {
        values.iter_mut().for_each(|x| *x = -*x);
    }
    let aux = Aux {
        screened: Some(retained),
        iterations: Some(iterations),
        ..Aux::default()
    };
    Ok(finish(method, p, support, &values, aux))
}

fn embed(p: usize, indices: &[usize], local: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p];
    for (&j, &v) in indices.iter().zip(local) {
        out[j] = v;
    }
    out
}
