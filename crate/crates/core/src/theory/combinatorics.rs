//! Overlap and Rademacher moment machinery behind the low-degree norm.

use std::ops::RangeInclusive;

use statrs::function::factorial;

/// `ln C(n, k)`; `−∞` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    factorial::ln_binomial(n, k)
}

/// Values `m` with positive probability of `|S ∩ S̃|` for two independent
/// uniform `k`-subsets of `[p]`.
pub fn hypergeom_overlap_range(p: usize, k: usize) -> RangeInclusive<usize> {
    (2 * k).saturating_sub(p)..=k
}

/// `P(|S ∩ S̃| = m) = C(k, m) C(p−k, k−m) / C(p, k)`; zero for `m` outside
/// [`hypergeom_overlap_range`] or `k > p`.
pub fn hypergeom_overlap_pmf(p: usize, k: usize, m: usize) -> f64 {
    if k > p || !hypergeom_overlap_range(p, k).contains(&m) {
        return 0.0;
    }
    let (p, k, m) = (p as u64, k as u64, m as u64);
    (ln_binomial(k, m) + ln_binomial(p - k, k - m) - ln_binomial(p, k)).exp()
}

/// `Σ_t C(n, t) (2t − n)^d` in exact integer arithmetic, if it fits.
fn signed_pattern_sum(n: u32, d: u32) -> Option<i128> {
    if n > 126 {
        return None;
    }
    let mut binom: i128 = 1;
    let mut total: i128 = 0;
    for t in 0..=n {
        let base = 2 * i128::from(t) - i128::from(n);
        total = total.checked_add(binom.checked_mul(base.checked_pow(d)?)?)?;
        binom = binom.checked_mul(i128::from(n - t))? / i128::from(t + 1);
    }
    Some(total)
}

/// `E[(R₁ + … + R_n)^d]` for independent Rademacher `Rᵢ`. The value is an
/// integer; it is computed exactly whenever the intermediate sums fit in 128
/// bits and by log-space summation otherwise.
pub fn rademacher_sum_moment(n: usize, d: usize) -> f64 {
    if d % 2 == 1 {
        return 0.0;
    }
    if d == 0 {
        return 1.0;
    }
    if n == 0 {
        return 0.0;
    }
    if let (Ok(n32), Ok(d32)) = (u32::try_from(n), u32::try_from(d)) {
        if let Some(total) = signed_pattern_sum(n32, d32) {
            return (total >> n) as f64 + ((total & ((1i128 << n) - 1)) as f64) / 2f64.powi(n as i32);
        }
    }
    let terms: Vec<f64> = (0..=n)
        .filter(|&t| 2 * t != n)
        .map(|t| {
            let base = (2.0 * t as f64 - n as f64).abs();
            ln_binomial(n as u64, t as u64) - n as f64 * std::f64::consts::LN_2 + d as f64 * base.ln()
        })
        .collect();
    log_sum_exp(&terms).exp()
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_infinite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: i64) -> f64 {
        (1..=n).rev().step_by(2).map(|x| x as f64).product()
    }

    /// All sign patterns of `n` Rademacher variables.
    fn enumerate_moment(n: usize, d: u32) -> f64 {
        let total: i128 = (0u32..1 << n)
            .map(|bits| {
                let s = 2 * bits.count_ones() as i128 - n as i128;
                s.pow(d)
            })
            .sum();
        total as f64 / (1u64 << n) as f64
    }

    /// All ordered pairs of `k`-subsets of `[p]`.
    fn enumerate_overlap(p: usize, k: usize) -> Vec<f64> {
        let subsets: Vec<u32> = (0u32..1 << p).filter(|s| s.count_ones() as usize == k).collect();
        let mut counts = vec![0.0; k + 1];
        for a in &subsets {
            for b in &subsets {
                counts[(a & b).count_ones() as usize] += 1.0;
            }
        }
        let total = (subsets.len() * subsets.len()) as f64;
        counts.iter().map(|c| c / total).collect()
    }

    #[test]
    fn overlap_by_enumeration() {
        for (p, k) in [(5, 2), (6, 3), (7, 2), (8, 4)] {
            for (m, want) in enumerate_overlap(p, k).into_iter().enumerate() {
                assert!((hypergeom_overlap_pmf(p, k, m) - want).abs() < 1e-14, "p={p} k={k} m={m}");
            }
        }
    }

    #[test]
    fn overlap_normalization_and_mean() {
        for p in 1..=40 {
            for k in 0..=p {
                let range = hypergeom_overlap_range(p, k);
                let total: f64 = range.clone().map(|m| hypergeom_overlap_pmf(p, k, m)).sum();
                let mean: f64 = range.map(|m| m as f64 * hypergeom_overlap_pmf(p, k, m)).sum();
                assert!((total - 1.0).abs() < 1e-11, "p={p} k={k}");
                assert!((mean - (k * k) as f64 / p as f64).abs() < 1e-10 * (1.0 + mean), "p={p} k={k}");
            }
        }
        assert_eq!(
            (0..=2).map(|m| m as f64 * hypergeom_overlap_pmf(4, 2, m)).sum::<f64>(),
            1.0
        );
    }

    #[test]
    fn overlap_out_of_range_is_zero() {
        assert_eq!(hypergeom_overlap_pmf(10, 3, 4), 0.0);
        assert_eq!(hypergeom_overlap_pmf(5, 4, 2), 0.0);
        assert!(hypergeom_overlap_pmf(5, 4, 3) > 0.0);
        assert_eq!(hypergeom_overlap_pmf(3, 4, 1), 0.0);
    }

    #[test]
    fn large_population_is_finite() {
        let total: f64 = (0..=100).map(|m| hypergeom_overlap_pmf(100_000, 100, m)).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rademacher_small_cases() {
        assert_eq!(rademacher_sum_moment(4, 4), 40.0);
        assert_eq!(rademacher_sum_moment(5, 3), 0.0);
        assert_eq!(rademacher_sum_moment(0, 0), 1.0);
        assert_eq!(rademacher_sum_moment(0, 2), 0.0);
        for n in 0..=14 {
            assert_eq!(rademacher_sum_moment(n, 2), n as f64);
            for d in 0..=8u32 {
                assert_eq!(rademacher_sum_moment(n, d as usize), enumerate_moment(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn rademacher_fourth_moment_closed_form() {
        for n in 0..=200usize {
            let want = (3 * n * n) as f64 - 2.0 * n as f64;
            let got = rademacher_sum_moment(n, 4);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn rademacher_gaussian_moment_bound() {
        for n in 0..=30 {
            for l in 0..=6i64 {
                let bound = (n as f64).powi(l as i32) * double_factorial(2 * l - 1);
                assert!(rademacher_sum_moment(n, 2 * l as usize) <= bound, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn exact_and_float_paths_agree() {
        let (n, d) = (60, 20);
        let exact = rademacher_sum_moment(n, d);
        let terms: Vec<f64> = (0..=n)
            .filter(|&t| 2 * t != n)
            .map(|t| {
                ln_binomial(n as u64, t as u64) - n as f64 * std::f64::consts::LN_2
                    + d as f64 * ((2.0 * t as f64 - n as f64).abs()).ln()
            })
            .collect();
        assert!((log_sum_exp(&terms).exp() / exact - 1.0).abs() < 1e-10);
        assert!(rademacher_sum_moment(300, 40).is_finite());
    }
}
