//! Sample-size thresholds below which exact support recovery fails.

use std::fmt;

use crate::error::{Error, Result};

fn check(k: usize, p: usize, delta: f64) -> Result<()> {
    if k == 0 || p <= k {
        return Err(Error::InvalidParams(format!("need 1 ≤ k < p, got k = {k}, p = {p}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParams(format!("need δ ∈ [0, 1], got {delta}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!("need finite λ ≥ 0, got {lambda}")));
    }
    Ok(())
}

/// Per-sample mutual information bound of a labeled pair, `λ/2k`.
pub fn labeled_information_bound(k: usize, lambda: f64) -> f64 {
    lambda / (2.0 * k as f64)
}

/// Per-sample mutual information bound of an unlabeled vector,
/// `(λ/2k)·min{1, λ}`.
pub fn unlabeled_information_bound(k: usize, lambda: f64) -> f64 {
    labeled_information_bound(k, lambda) * lambda.min(1.0)
}

/// `L₀ = 2(1−δ) k ln(p−k+1) / λ`; `+∞` when `λ = 0`.
pub fn sl_threshold(k: usize, lambda: f64, p: usize, delta: f64) -> Result<f64> {
    check(k, p, delta)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (1.0 - delta) * k as f64 * ((p - k + 1) as f64).ln() / lambda)
}

/// `n₀ = 2(1−δ) k ln(p−k+1) max{1, λ} / λ²`; `+∞` when `λ = 0`.
pub fn ul_threshold(k: usize, lambda: f64, p: usize, delta: f64) -> Result<f64> {
    check(k, p, delta)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (1.0 - delta) * k as f64 * ((p - k + 1) as f64).ln() * lambda.max(1.0) / (lambda * lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every estimator fails exact recovery with probability at least δ.
    BelowBound,
    /// The bound makes no claim.
    AboveBound,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::BelowBound => "below-bound",
            Verdict::AboveBound => "above-bound",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdReport {
    pub sl_max_l: f64,
    pub ul_max_n: f64,
    pub delta: f64,
    /// `L/L₀ + n/n₀`.
    pub load: f64,
    /// Split `q ∈ [0, 1]` with `L ≤ q L₀` and `n ≤ (1−q) n₀` when one
    /// exists; otherwise `L/L₀` clamped to `[0, 1]`.
    pub q: f64,
    pub verdict: Verdict,
}

const LOAD_TOLERANCE: f64 = 1e-12;

/// Whether some split `q` puts `(L, n)` under both thresholds, i.e.
/// `L/L₀ + n/n₀ ≤ 1` (up to rounding in the two ratios). Counts are taken as reals so that boundary points can
/// be probed exactly.
pub fn fusion_verdict(labeled: f64, unlabeled: f64, k: usize, lambda: f64, p: usize, delta: f64) -> Result<ThresholdReport> {
    if delta >= 1.0 {
        return Err(Error::InvalidParams("fusion needs δ < 1".into()));
    }
    if !(labeled >= 0.0 && unlabeled >= 0.0) {
        return Err(Error::InvalidParams("sample counts must be nonnegative".into()));
    }
    let l0 = sl_threshold(k, lambda, p, delta)?;
    let n0 = ul_threshold(k, lambda, p, delta)?;
    let share_l = labeled / l0;
    let load = share_l + unlabeled / n0;
    let verdict = if load <= 1.0 + LOAD_TOLERANCE {
        Verdict::BelowBound
    } else {
        Verdict::AboveBound
    };
    Ok(ThresholdReport {
        sl_max_l: l0,
        ul_max_n: n0,
        delta,
        load,
        q: share_l.clamp(0.0, 1.0),
        verdict,
    })
}
