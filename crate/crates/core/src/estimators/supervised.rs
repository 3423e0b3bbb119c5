//! Estimators using the labeled pairs only.

use super::{check_k, finish, Aux, EstimatorOutput, Method};
use crate::error::{Error, Result};
use crate::gmodel::Dataset;
use crate::select::top_k_by_magnitude;

/// Difference of the empirical class means, `x̄₊ − x̄₋`.
pub fn labeled_direction(data: &Dataset) -> Result<Vec<f64>> {
    let p = data.p();
    let mut plus = vec![0.0; p];
    let mut minus = vec![0.0; p];
    let (mut n_plus, mut n_minus) = (0usize, 0usize);
    for (row, &y) in data.labeled().iter().zip(data.labels()) {
        if y > 0 {
            row.add_scaled_to(1.0, &mut plus);
            n_plus += 1;
        } else {
            row.add_scaled_to(1.0, &mut minus);
            n_minus += 1;
        }
    }
    if n_plus == 0 {
        return Err(Error::MissingClass(1));
    }
    if n_minus == 0 {
        return Err(Error::MissingClass(-1));
    }
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| a / n_plus as f64 - b / n_minus as f64)
        .collect())
}

/// `(1/L) Σ yᵢ xᵢ`.
pub fn signed_mean_direction(data: &Dataset) -> Result<Vec<f64>> {
    let l = data.labeled_len();
    if l == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut w = vec![0.0; data.p()];
    for (row, &y) in data.labeled().iter().zip(data.labels()) {
        row.add_scaled_to(f64::from(y), &mut w);
    }
    w.iter_mut().for_each(|x| *x /= l as f64);
    Ok(w)
}

/// The `k` largest magnitudes of the signed mean; this is the maximum
/// likelihood support given the labeled pairs alone.
pub fn top_k_labeled(data: &Dataset, k: usize) -> Result<EstimatorOutput> {
    check_k(data.p(), k)?;
    let w = signed_mean_direction(data)?;
    let support = top_k_by_magnitude(&w, k);
    Ok(finish(Method::TopKLabeled, data.p(), support, &w, Aux::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::testutil::{instance, permute, rotation};
    use crate::spectral::norm;

    fn pairs(p: usize, labeled: &[(Vec<f64>, i8)]) -> Dataset {
        Dataset::from_parts(p, labeled, &[]).unwrap()
    }

    #[test]
    fn two_sample_difference() {
        let d = pairs(3, &[(vec![1.0, 2.0, 3.0], 1), (vec![0.5, -1.0, 4.0], -1)]);
        assert_eq!(labeled_direction(&d).unwrap(), vec![0.5, 3.0, -1.0]);
    }

    #[test]
    fn symmetric_class_means() {
        let m = vec![1.0, -2.0];
        let neg: Vec<f64> = m.iter().map(|x| -x).collect();
        let d = pairs(2, &[(m.clone(), 1), (neg.clone(), -1), (m.clone(), 1), (neg, -1)]);
        assert_eq!(labeled_direction(&d).unwrap(), vec![2.0, -4.0]);
        let half: Vec<f64> = labeled_direction(&d).unwrap().iter().map(|x| x / 2.0).collect();
        assert_eq!(signed_mean_direction(&d).unwrap(), half);
    }

    #[test]
    fn missing_class() {
        let d = pairs(2, &[(vec![1.0, 0.0], 1)]);
        assert!(matches!(labeled_direction(&d), Err(Error::MissingClass(-1))));
        assert_eq!(signed_mean_direction(&d).unwrap(), vec![1.0, 0.0]);
        let unlabeled = Dataset::from_parts(2, &[], &[vec![0.0, 0.0]]).unwrap();
        assert!(signed_mean_direction(&unlabeled).is_err());
    }

    #[test]
    fn large_sample_concentration() {
        let (mu, d) = instance(50, 5, 4.0, 10_000, 0, 17);
        let bound = 5.0 * (4.0 * 50.0 / 10_000f64).sqrt();
        let two_mu: Vec<f64> = mu.to_dense().iter().map(|x| 2.0 * x).collect();
        let diff: Vec<f64> = labeled_direction(&d).unwrap().iter().zip(&two_mu).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) <= bound, "{}", norm(&diff));
        let diff: Vec<f64> = signed_mean_direction(&d)
            .unwrap()
            .iter()
            .zip(mu.to_dense())
            .map(|(a, b)| a - b)
            .collect();
        assert!(norm(&diff) <= bound / 2.0, "{}", norm(&diff));
    }

    #[test]
    fn sorts_by_magnitude() {
        let d = pairs(3, &[(vec![0.1, -0.5, 0.3], 1)]);
        let out = top_k_labeled(&d, 2).unwrap();
        assert_eq!(out.support, vec![1, 2]);
        let n = (0.25f64 + 0.09).sqrt();
        for (got, want) in out.direction.iter().zip([0.0, -0.5 / n, 0.3 / n]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_signal_uses_tie_rule() {
        let d = pairs(5, &[(vec![1.0, 0.0, 0.0, 0.0, 0.0], 1), (vec![1.0, 0.0, 0.0, 0.0, 0.0], -1)]);
        assert_eq!(top_k_labeled(&d, 3).unwrap().support, vec![0, 1, 2]);
    }

    /// Exhaustive search over all supports of size `k` and sign patterns.
    fn brute_force_mle(w: &[f64], k: usize) -> Vec<usize> {
        let p = w.len();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            for signs in 0..(1u32 << k) {
                let score: f64 = subset
                    .iter()
                    .enumerate()
                    .map(|(t, &j)| if signs >> t & 1 == 1 { -w[j] } else { w[j] })
                    .sum();
                if score > best.0 + 1e-12 {
                    best = (score, subset.clone());
                }
            }
            let Some(t) = (0..k).rev().find(|&t| subset[t] < p - k + t) else {
                break;
            };
            subset[t] += 1;
            for u in t + 1..k {
                subset[u] = subset[u - 1] + 1;
            }
        }
        best.1
    }

    #[test]
    fn agrees_with_exhaustive_likelihood() {
        for seed in 0..50 {
            let (_, d) = instance(8, 2, 1.0, 5, 0, seed);
            let w = signed_mean_direction(&d).unwrap();
            assert_eq!(top_k_labeled(&d, 2).unwrap().support, brute_force_mle(&w, 2), "seed {seed}");
        }
    }

    #[test]
    fn permutation_equivariance() {
        let (_, d) = instance(30, 4, 2.0, 40, 0, 5);
        let perm = rotation(30, 3);
        let a = top_k_labeled(&d, 4).unwrap();
        let b = top_k_labeled(&permute(&d, &perm), 4).unwrap();
        let mut mapped: Vec<usize> = a.support.iter().map(|&j| perm[j]).collect();
        mapped.sort_unstable();
        assert_eq!(b.support, mapped);
        for j in 0..30 {
            assert!((b.direction[perm[j]] - a.direction[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn label_flip_negates_direction() {
        let (_, d) = instance(30, 4, 2.0, 40, 0, 6);
        let flipped: Vec<(Vec<f64>, i8)> = d
            .labeled()
            .iter()
            .zip(d.labels())
            .map(|(r, &y)| (r.to_vec(), -y))
            .collect();
        let f = Dataset::from_parts(30, &flipped, &[]).unwrap();
        let a = top_k_labeled(&d, 4).unwrap();
        let b = top_k_labeled(&f, 4).unwrap();
        assert_eq!(a.support, b.support);
        for (x, y) in a.direction.iter().zip(&b.direction) {
            assert_eq!(*x, -*y);
        }
    }
}
