//! Evaluation metrics: Gaussian tail, support overlap, closed-form
//! generalization error and excess risk.
//!
//! For a unit direction `v`, the classifier `x ↦ sign⟨v, x⟩` under the
//! symmetric mixture errs with probability `Φᶜ(⟨v, μ⟩)`. The Bayes rule uses
//! `v = μ/‖μ‖` and errs with probability `Φᶜ(√λ)`.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gmodel::{Dataset, SparseMean};
use crate::spectral::norm;

/// Allowed deviation of a direction's norm from 1.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Upper tail of the standard normal, `Φᶜ(t) = P(Z > t)`.
pub fn phi_c(t: f64) -> f64 {
    0.5 * erfc(t / std::f64::consts::SQRT_2)
}

/// Error of the Bayes classifier, `Φᶜ(√λ)`.
pub fn bayes_error(lambda: f64) -> f64 {
    phi_c(lambda.max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialMetrics {
    pub overlap: f64,
    pub gen_error: f64,
    pub excess_risk: f64,
    pub runtime_ms: f64,
}

/// `|S ∩ Ŝ| / k`.
pub fn support_overlap(truth: &[usize], estimate: &[usize], k: usize) -> Result<f64> {
    if estimate.len() != k || k == 0 {
        return Err(Error::Contract(format!(
            "estimated support has {} indices, expected k = {k}",
            estimate.len()
        )));
    }
    let common = estimate.iter().filter(|j| truth.contains(j)).count();
    Ok(common as f64 / k as f64)
}

fn check_unit(direction: &[f64]) -> Result<()> {
    let n = norm(direction);
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Contract(format!("direction has norm {n}, expected 1")));
    }
    Ok(())
}

/// `Φᶜ(⟨v, μ⟩)` for a unit direction `v`.
pub fn generalization_error(mu: &SparseMean, direction: &[f64]) -> Result<f64> {
    if direction.len() != mu.p() {
        return Err(Error::Contract(format!(
            "direction has length {}, expected {}",
            direction.len(),
            mu.p()
        )));
    }
    check_unit(direction)?;
    Ok(phi_c(mu.dot(direction)))
}

/// Generalization error minus the Bayes error. Floating-point noise down to
/// `−1e−12` is reported as 0.
pub fn excess_risk(mu: &SparseMean, direction: &[f64]) -> Result<f64> {
    let excess = generalization_error(mu, direction)? - bayes_error(mu.lambda());
    Ok(if (-1e-12..0.0).contains(&excess) { 0.0 } else { excess })
}

/// Fraction of labeled pairs with `sign⟨v, x⟩ ≠ y` (`sign 0 = +1`).
pub fn empirical_error(direction: &[f64], test: &Dataset) -> Result<f64> {
    if direction.len() != test.p() {
        return Err(Error::Contract("direction and data dimensions differ".into()));
    }
    let total = test.labeled_len();
    if total == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let wrong = test
        .labeled()
        .iter()
        .zip(test.labels())
        .filter(|(x, &y)| {
            let predicted = if x.dot(direction) >= 0.0 { 1 } else { -1 };
            predicted != y
        })
        .count();
    Ok(wrong as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmodel::{make_sparse_mean, sample_dataset, ProblemParams, SupportSpec};
    use proptest::prelude::*;

    /// Composite Simpson on `[t, t + 40]` of the standard normal density.
    fn tail_by_quadrature(t: f64) -> f64 {
        let steps = 400_000;
        let h = 40.0 / steps as f64;
        let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = density(t) + density(t + 40.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * density(t + i as f64 * h);
        }
        s * h / 3.0
    }

    fn mean(p: usize, k: usize, lambda: f64, seed: u64) -> SparseMean {
        make_sparse_mean(&ProblemParams::new(p, k, lambda, 1, 0, seed).unwrap(), &SupportSpec::Random).unwrap()
    }

    #[test]
    fn tail_reference_values() {
        assert_eq!(phi_c(0.0), 0.5);
        assert!((phi_c(3f64.sqrt()) - 0.0416).abs() < 5e-4);
        let oracle = tail_by_quadrature(2.0);
        assert!((oracle - 0.022_750_131_948_179_2).abs() < 1e-13);
        for t in [-3.0, -0.7, 0.3, 1.0, 2.0, 4.5, 7.0] {
            let q = tail_by_quadrature(t);
            assert!((phi_c(t) - q).abs() <= 1e-9 * q, "t = {t}");
        }
    }

    proptest! {
        #[test]
        fn tail_symmetry_and_monotonicity(t in -8.0f64..8.0, dt in 1e-3f64..1.0) {
            prop_assert!((phi_c(t) + phi_c(-t) - 1.0).abs() < 1e-12);
            prop_assert!(phi_c(t + dt) < phi_c(t));
        }

        #[test]
        fn mills_ratio_bound(t in 1.0f64..30.0) {
            let bound = (-0.5 * t * t).exp() / (t * (2.0 * std::f64::consts::PI).sqrt());
            prop_assert!(phi_c(t) <= bound);
        }

        #[test]
        fn excess_risk_is_nonnegative(raw in prop::collection::vec(-1.0f64..1.0, 12), seed in 0u64..1000) {
            let mu = mean(12, 3, 2.0, seed);
            let n = norm(&raw);
            prop_assume!(n > 1e-3);
            let v: Vec<f64> = raw.iter().map(|x| x / n).collect();
            prop_assert!(excess_risk(&mu, &v).unwrap() >= 0.0);
        }
    }

    #[test]
    fn overlap_counts() {
        assert_eq!(support_overlap(&[1, 2, 3, 4], &[1, 2, 3, 4], 4).unwrap(), 1.0);
        assert_eq!(support_overlap(&[1, 2], &[3, 4], 2).unwrap(), 0.0);
        assert_eq!(support_overlap(&[0, 1, 2, 3], &[2, 3, 8, 9], 4).unwrap(), 0.5);
        assert!(matches!(support_overlap(&[0, 1], &[0], 2), Err(Error::Contract(_))));
    }

    #[test]
    fn closed_form_error_cases() {
        let mu = mean(10, 4, 3.0, 1);
        let aligned: Vec<f64> = mu.to_dense().iter().map(|x| x / 3f64.sqrt()).collect();
        let bayes = bayes_error(3.0);
        assert!((generalization_error(&mu, &aligned).unwrap() - bayes).abs() < 1e-15);
        assert_eq!(excess_risk(&mu, &aligned).unwrap(), 0.0);

        let flipped: Vec<f64> = aligned.iter().map(|x| -x).collect();
        assert!((generalization_error(&mu, &flipped).unwrap() - (1.0 - bayes)).abs() < 1e-15);

        let off = (0..10).find(|j| !mu.support().contains(j)).unwrap();
        let mut orth = vec![0.0; 10];
        orth[off] = 1.0;
        assert_eq!(generalization_error(&mu, &orth).unwrap(), 0.5);
        assert!((excess_risk(&mu, &orth).unwrap() - (0.5 - bayes)).abs() < 1e-15);

        assert!(matches!(generalization_error(&mu, &[0.5; 10]), Err(Error::Contract(_))));
    }

    #[test]
    fn empirical_matches_closed_form() {
        let mu = mean(20, 4, 1.0, 3);
        let mut v = vec![0.0; 20];
        v[mu.support()[0]] = 0.8;
        v[mu.support()[1]] = -0.6;
        if v[mu.support()[0]] * mu.to_dense()[mu.support()[0]] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let q = generalization_error(&mu, &v).unwrap();
        let m = 100_000;
        let test = sample_dataset(&mu, m, 0, 99).unwrap();
        let emp = empirical_error(&v, &test).unwrap();
        assert!((emp - q).abs() <= 3.0 * (q * (1.0 - q) / m as f64).sqrt(), "{emp} vs {q}");
    }

    #[test]
    fn perfect_and_chance_classifiers() {
        let mu_vec = [1.0, 0.0, 0.0];
        let labeled: Vec<(Vec<f64>, i8)> = (0..10)
            .map(|i| {
                let y: i8 = if i % 2 == 0 { 1 } else { -1 };
                (mu_vec.iter().map(|x| x * y as f64).collect(), y)
            })
            .collect();
        let noiseless = Dataset::from_parts(3, &labeled, &[]).unwrap();
        assert_eq!(empirical_error(&[1.0, 0.0, 0.0], &noiseless).unwrap(), 0.0);

        let mu = mean(30, 3, 2.0, 5);
        let test = sample_dataset(&mu, 20_000, 0, 6).unwrap();
        let off: Vec<usize> = (0..30).filter(|j| !mu.support().contains(j)).collect();
        let mut v = vec![0.0; 30];
        v[off[0]] = 1.0;
        assert!((empirical_error(&v, &test).unwrap() - 0.5).abs() < 0.02);
    }
}
