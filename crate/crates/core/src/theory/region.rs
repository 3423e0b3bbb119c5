//! Phase diagram over `(α, β, γ)`: `k ∝ p^α`, `L ∝ β k ln p / λ`,
//! `n ∝ k^γ / λ²`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// Labeled data alone suffice (`β > 1 − α`).
    SlEasy,
    /// Unlabeled data alone suffice computationally (`γ ≥ 2`).
    UlEasy,
    /// LSPCA succeeds (`1 < γ < 2`, `1 − γα < β < 1 − α`).
    SslEasyBlue,
    /// Low-degree hard (`1 < γ < 2`, `β < 1/2 − α`).
    HardOrange,
    /// Information-theoretically impossible (`γ ≤ 1`, `β < 1 − α`).
    ImpossibleRed,
    /// Not characterized.
    UnknownWhite,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::SlEasy => "SL_EASY",
            RegionLabel::UlEasy => "UL_EASY",
            RegionLabel::SslEasyBlue => "SSL_EASY_BLUE",
            RegionLabel::HardOrange => "HARD_ORANGE",
            RegionLabel::ImpossibleRed => "IMPOSSIBLE_RED",
            RegionLabel::UnknownWhite => "UNKNOWN_WHITE",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three β-boundaries at a given `(α, γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionBoundaries {
    /// `1 − γα`: detection boundary with `n ∝ k^γ`.
    pub ssl: f64,
    /// `1 − α`: supervised recovery boundary.
    pub sl: f64,
    /// `1/2 − α`: low-degree hardness boundary.
    pub hard: f64,
}

pub fn region_boundaries(alpha: f64, gamma: f64) -> RegionBoundaries {
    RegionBoundaries {
        ssl: 1.0 - gamma * alpha,
        sl: 1.0 - alpha,
        hard: 0.5 - alpha,
    }
}

/// Classifies `(α, β, γ)`; the first matching rule wins:
/// SL_EASY, UL_EASY, SSL_EASY_BLUE, HARD_ORANGE, IMPOSSIBLE_RED, otherwise
/// UNKNOWN_WHITE. All inequalities are strict except `γ ≥ 2` and `γ ≤ 1`.
pub fn region_classify(alpha: f64, beta: f64, gamma: f64) -> Result<RegionLabel> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("α must lie in (0, 1/2), got {alpha}")));
    }
    if !(beta >= 0.0) || !(gamma >= 0.0) || beta.is_infinite() || gamma.is_infinite() {
        return Err(Error::Domain(format!("need finite β, γ ≥ 0, got β = {beta}, γ = {gamma}")));
    }
    let b = region_boundaries(alpha, gamma);
    let mid_gamma = gamma > 1.0 && gamma < 2.0;
    Ok(if beta > b.sl {
        RegionLabel::SlEasy
    } else if gamma >= 2.0 {
        RegionLabel::UlEasy
    } else if mid_gamma && b.ssl < beta && beta < b.sl {
        RegionLabel::SslEasyBlue
    } else if mid_gamma && beta < b.hard {
        RegionLabel::HardOrange
    } else if gamma <= 1.0 && beta < b.sl {
        RegionLabel::ImpossibleRed
    } else {
        RegionLabel::UnknownWhite
    })
}
