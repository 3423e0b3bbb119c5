//! Support and direction estimators.
//!
//! Every estimator returns an [`EstimatorOutput`]: exactly `k` support
//! indices and a unit direction vanishing off that support. Ties are always
//! broken towards the lowest index.

mod lspca;
mod self_training;
mod supervised;
mod unsupervised;

use std::fmt;
use std::str::FromStr;

pub use lspca::{auto_beta_tilde, lspca, screening_size, LspcaConfig};
pub use self_training::{self_train, DEFAULT_GAMMA};
pub use supervised::{labeled_direction, signed_mean_direction, top_k_labeled};
pub use unsupervised::{ul_diag_threshold_pca, ul_screening_size, vanilla_pca};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{norm, CovarianceForm, EigenOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    TopKLabeled,
    Lspca,
    Ls2pca,
    SelfTrain,
    UlDiagPca,
    VanillaPca,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::TopKLabeled,
        Method::Lspca,
        Method::Ls2pca,
        Method::SelfTrain,
        Method::UlDiagPca,
        Method::VanillaPca,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::TopKLabeled => "top_k_labeled",
            Method::Lspca => "lspca",
            Method::Ls2pca => "ls2pca",
            Method::SelfTrain => "self_train",
            Method::UlDiagPca => "ul_diag_pca",
            Method::VanillaPca => "vanilla_pca",
        }
    }

    /// Whether the method reads labels.
    pub fn uses_labels(self) -> bool {
        matches!(self, Method::TopKLabeled | Method::Lspca | Method::Ls2pca | Method::SelfTrain)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s.trim())
            .ok_or_else(|| Error::InvalidParams(format!("unknown method `{s}`")))
    }
}

/// Diagnostics reported alongside an estimate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Aux {
    /// Size of the screening set (LSPCA `S_L`, or the high-variance set).
    pub screened: Option<usize>,
    /// Pseudo-labeled samples admitted by self-training.
    pub n_eff: Option<usize>,
    /// Operator applications across all eigen-solves.
    pub iterations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOutput {
    pub method: Method,
    /// Sorted, exactly `k` indices.
    pub support: Vec<usize>,
    /// Unit vector of length `p`, zero off `support`.
    pub direction: Vec<f64>,
    pub aux: Aux,
}

impl EstimatorOutput {
    /// Checks the output contract for dimension `p` and sparsity `k`.
    pub fn check(&self, p: usize, k: usize) -> Result<()> {
        if self.support.len() != k {
            return Err(Error::Contract(format!("support has {} indices, expected {k}", self.support.len())));
        }
        if self.support.windows(2).any(|w| w[0] >= w[1]) || self.support.last().is_some_and(|&j| j >= p) {
            return Err(Error::Contract("support must be sorted, distinct and in range".into()));
        }
        if self.direction.len() != p {
            return Err(Error::Contract(format!("direction has length {}, expected {p}", self.direction.len())));
        }
        let stray = self
            .direction
            .iter()
            .enumerate()
            .any(|(j, &v)| v != 0.0 && self.support.binary_search(&j).is_err());
        if stray {
            return Err(Error::Contract("direction has nonzeros off the support".into()));
        }
        let n = norm(&self.direction);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("direction has norm {n}")));
        }
        Ok(())
    }
}

/// Numerical controls for the spectral estimators.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpectralOptions {
    pub eigen: EigenOptions,
    pub form: CovarianceForm,
    pub exec: Execution,
}

/// Builds the output from a dense score vector: keeps `values` on `support`,
/// normalizes, and falls back to a uniform positive vector when the
/// restriction is zero.
pub(crate) fn finish(method: Method, p: usize, support: Vec<usize>, values: &[f64], aux: Aux) -> EstimatorOutput {
    let mut direction = vec![0.0; p];
    for &j in &support {
        direction[j] = values[j];
    }
    normalize_on(&mut direction, &support);
    let out = EstimatorOutput {
        method,
        support,
        direction,
        aux,
    };
    #[cfg(debug_assertions)]
    if let Err(e) = out.check(p, out.support.len()) {
        panic!("{method} violated the output contract: {e}");
    }
    out
}

fn normalize_on(v: &mut [f64], support: &[usize]) {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
        // A second pass removes the last few ulps of drift.
        let n = norm(v);
        v.iter_mut().for_each(|x| *x /= n);
    } else {
        v.iter_mut().for_each(|x| *x = 0.0);
        let w = 1.0 / (support.len() as f64).sqrt();
        for &j in support {
            v[j] = w;
        }
    }
}

pub(crate) fn check_k(p: usize, k: usize) -> Result<()> {
    if k == 0 || k > p {
        return Err(Error::InvalidParams(format!("need 1 ≤ k ≤ p = {p}, got k = {k}")));
    }
    Ok(())
}
