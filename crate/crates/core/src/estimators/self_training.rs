//! Self-training: pseudo-label the unlabeled vectors with the sparse labeled
//! estimate, keep the confident ones and re-estimate.

use super::{check_k, finish, signed_mean_direction, Aux, EstimatorOutput, Method};
use crate::error::{Error, Result};
use crate::gmodel::Dataset;
use crate::select::top_k_by_magnitude;

/// Default confidence threshold `Γ`.
pub const DEFAULT_GAMMA: f64 = 0.8;

/// Pseudo-labels `ỹᵢ = sign(cᵢ)` with `cᵢ = ⟨w_L^{(k)}, xᵢ⟩` are admitted
/// when `|cᵢ| > Γ` (so `cᵢ = 0` is never admitted), then the support is the
/// top `k` of the pooled signed mean.
pub fn self_train(data: &Dataset, k: usize, gamma: f64) -> Result<EstimatorOutput> {
    let p = data.p();
    check_k(p, k)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidParams(format!("threshold Γ must be ≥ 0, got {gamma}")));
    }
    let w = signed_mean_direction(data)?;
    let top = top_k_by_magnitude(&w, k);
    let top_values: Vec<f64> = top.iter().map(|&j| w[j]).collect();

    let l = data.labeled_len();
    let mut pooled: Vec<f64> = w.iter().map(|x| x * l as f64).collect();
    let mut n_eff = 0usize;
    for row in data.unlabeled().iter() {
        let c = row.dot_at(&top, &top_values);
        if c.abs() > gamma {
            row.add_scaled_to(c.signum(), &mut pooled);
            n_eff += 1;
        }
    }
    if n_eff == 0 {
        pooled = w;
    } else {
        pooled.iter_mut().for_each(|x| *x /= (l + n_eff) as f64);
    }

    let support = top_k_by_magnitude(&pooled, k);
    let aux = Aux {
        n_eff: Some(n_eff),
        ..Aux::default()
    };
    Ok(finish(Method::SelfTrain, p, support, &pooled, aux))
}
