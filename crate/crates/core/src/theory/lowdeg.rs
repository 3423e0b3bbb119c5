//! Norm of the degree-`D` projection of the likelihood ratio for detecting
//! the sparse mixture from `L` labeled and `n` unlabeled samples.
//!
//! With `G` the overlap of two independent uniform supports and `R` a sum of
//! `n` independent signs,
//!
//! ```text
//! ‖L^{≤D}‖² = Σ_{d=0}^{D} (1/d!) (λ/k)^d E[G^d] E[(L + R)^d].
//! ```

use rand_distr::{Binomial, Distribution, Hypergeometric};

use statrs::function::factorial::binomial;

use super::combinatorics::{hypergeom_overlap_pmf, hypergeom_overlap_range, ln_binomial, log_sum_exp, rademacher_sum_moment};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::stream_rng;

pub const EXACT_MAX_K: usize = 64;
pub const EXACT_MAX_N: usize = 64;
pub const EXACT_MAX_DEGREE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowDegParams {
    pub p: usize,
    pub k: usize,
    pub labeled: usize,
    pub unlabeled: usize,
    pub lambda: f64,
    pub degree: usize,
}

impl LowDegParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.p {
            return Err(Error::InvalidParams(format!("need 1 ≤ k ≤ p, got k = {}, p = {}", self.k, self.p)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!("need finite λ ≥ 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Exact truncated sum. Requires `k ≤ 64`, `n ≤ 64` and `D ≤ 30`.
pub fn lowdeg_norm_exact(params: &LowDegParams) -> Result<f64> {
    params.validate()?;
    let LowDegParams { p, k, labeled, unlabeled, lambda, degree } = *params;
    if k > EXACT_MAX_K || unlabeled > EXACT_MAX_N || degree > EXACT_MAX_DEGREE {
        return Err(Error::ExactInfeasible(format!(
            "exact evaluation needs k ≤ {EXACT_MAX_K}, n ≤ {EXACT_MAX_N}, D ≤ {EXACT_MAX_DEGREE} \
             (got k = {k}, n = {unlabeled}, D = {degree}); use the bound or Monte Carlo"
        )));
    }
    let pmf: Vec<(f64, f64)> = hypergeom_overlap_range(p, k)
        .map(|m| (m as f64, hypergeom_overlap_pmf(p, k, m)))
        .collect();
    let rademacher: Vec<f64> = (0..=degree).map(|l| rademacher_sum_moment(unlabeled, l)).collect();
    let l = labeled as f64;
    let scale = lambda / k as f64;

    let mut total = 0.0;
    let mut coef = 1.0; // (λ/k)^d / d!
    for d in 0..=degree {
        if d > 0 {
            coef *= scale / d as f64;
        }
        if d == 0 {
            total += 1.0;
            continue;
        }
        let overlap: f64 = pmf.iter().map(|&(m, w)| w * m.powi(d as i32)).sum();
        let shifted: f64 = (0..=d)
            .map(|j| binomial(d as u64, j as u64) * l.powi((d - j) as i32) * rademacher[j])
            .sum();
        total += coef * overlap * shifted;
    }
    Ok(total)
}

/// Upper bounds on the norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowDegBound {
    /// `(1 + k/(p−k)^{1−2β−ε})^k`.
    pub closed_form: f64,
    pub ln_closed_form: f64,
    /// `Σ_d (λ/k)^d/d! · (L + nD/2L)^d · Σ_m m^d C(k,m) (k/(p−k))^m`, a valid
    /// bound for any parameters with `L ≥ 1`.
    pub per_degree: f64,
    pub epsilon: f64,
    /// `1 − 2β − ε`.
    pub exponent: f64,
    /// Smallest `ε` for which the closed form dominates `per_degree` at these
    /// counts: `(Lλ/k + nλD/2Lk)/ln(p−k) − 2β`.
    pub epsilon_needed: f64,
    /// Whether `ε ≥ epsilon_needed`, i.e. the closed form is itself a bound.
    pub certified: bool,
}

/// Evaluates both bounds in log-space. `ε` defaults to `1/2 − α − β` when
/// that is positive and to `epsilon_needed` otherwise.
pub fn lowdeg_norm_upper_bound(params: &LowDegParams, alpha: f64, beta: f64, epsilon: Option<f64>) -> Result<LowDegBound> {
    params.validate()?;
    let LowDegParams { p, k, labeled, unlabeled, lambda, degree } = *params;
    if labeled == 0 {
        return Err(Error::BoundInapplicable("the bound needs L ≥ 1".into()));
    }
    if p <= k + 1 {
        return Err(Error::BoundInapplicable("the bound needs p − k ≥ 2".into()));
    }
    let (kf, l, n, dd) = (k as f64, labeled as f64, unlabeled as f64, degree as f64);
    let log_pk = ((p - k) as f64).ln();
    let rate = l * lambda / kf + n * lambda * dd / (2.0 * l * kf);
    let epsilon_needed = rate / log_pk - 2.0 * beta;
    let epsilon = epsilon.unwrap_or_else(|| {
        let default = 0.5 - alpha - beta;
        if default > 0.0 {
            default
        } else {
            epsilon_needed
        }
    });
    let exponent = 1.0 - 2.0 * beta - epsilon;
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::BoundInapplicable(format!(
            "need 0 < 2β + ε < 1, got 2β + ε = {}",
            2.0 * beta + epsilon
        )));
    }
    let ln_closed_form = kf * (kf.ln() - exponent * log_pk).exp().ln_1p();

    let ln_ratio = kf.ln() - log_pk;
    let ln_shift = (l + n * dd / (2.0 * l)).ln();
    let ln_scale = (lambda / kf).ln();
    let mut degree_terms = Vec::with_capacity(degree + 1);
    let mut ln_fact = 0.0;
    for d in 0..=degree {
        if d > 0 {
            ln_fact += (d as f64).ln();
        }
        let moments: Vec<f64> = (0..=k)
            .filter(|&m| m > 0 || d == 0)
            .map(|m| d as f64 * (m.max(1) as f64).ln() + ln_binomial(k as u64, m as u64) + m as f64 * ln_ratio)
            .collect();
        let head = if d == 0 { 0.0 } else { d as f64 * (ln_scale + ln_shift) };
        degree_terms.push(head - ln_fact + log_sum_exp(&moments));
    }
    let per_degree = log_sum_exp(&degree_terms).exp();

    Ok(LowDegBound {
        closed_form: ln_closed_form.exp(),
        ln_closed_form,
        per_degree,
        epsilon,
        exponent,
        epsilon_needed,
        certified: epsilon >= epsilon_needed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

const MC_CHUNK: usize = 4096;

/// Averages `Σ_{d≤D} (λ G (L + R)/k)^d / d!` over independent draws of the
/// overlap `G` and sign sum `R`. Chunks use independent streams, so the
/// result does not depend on the thread count.
pub fn lowdeg_norm_monte_carlo(params: &LowDegParams, samples: usize, seed: u64, exec: Execution) -> Result<MonteCarloEstimate> {
    params.validate()?;
    if samples < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples });
    }
    let LowDegParams { p, k, labeled, unlabeled, lambda, degree } = *params;
    let overlap = Hypergeometric::new(p as u64, k as u64, k as u64).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let signs = Binomial::new(unlabeled as u64, 0.5).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let scale = lambda / k as f64;
    let partials = exec.map_chunks(samples, MC_CHUNK, |range| {
        let mut rng = stream_rng(seed, range.start as u64 / MC_CHUNK as u64);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in range {
            let g = overlap.sample(&mut rng) as f64;
            let r = 2.0 * signs.sample(&mut rng) as f64 - unlabeled as f64;
            let x = scale * g * (labeled as f64 + r);
            let value = truncated_exp(x, degree);
            sum += value;
            sum_sq += value * value;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / m).sqrt(),
        samples,
    })
}

fn truncated_exp(x: f64, degree: usize) -> f64 {
    let mut term = 1.0;
    let mut total = 1.0;
    for d in 1..=degree {
        term *= x / d as f64;
        total += term;
    }
    total
}
