//! Closed-form calculators: information-theoretic sample thresholds, the
//! low-degree likelihood ratio norm and the phase-diagram regions.

mod combinatorics;
mod lowdeg;
mod region;
mod thresholds;

pub use combinatorics::{hypergeom_overlap_pmf, hypergeom_overlap_range, ln_binomial, rademacher_sum_moment};
pub use lowdeg::{
    lowdeg_norm_exact, lowdeg_norm_monte_carlo, lowdeg_norm_upper_bound, LowDegBound, LowDegParams, MonteCarloEstimate,
    EXACT_MAX_DEGREE, EXACT_MAX_K, EXACT_MAX_N,
};
pub use region::{region_boundaries, region_classify, RegionBoundaries, RegionLabel};
pub use thresholds::{
    fusion_verdict, labeled_information_bound, sl_threshold, ul_threshold, unlabeled_information_bound,
    ThresholdReport, Verdict,
};
