//! Experiment configuration and its flat `key = value` file format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::gmodel::{labeled_from_beta, sparsity_from_alpha, unlabeled_from_gamma};

pub const DEFAULT_P: usize = 100_000;
pub const DEFAULT_ALPHA: f64 = 0.4;
pub const DEFAULT_LAMBDA: f64 = 3.0;
pub const DEFAULT_LABELED: usize = 200;
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_GRID_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Unlabeled,
    Labeled,
}

impl Axis {
    pub fn tag(self) -> &'static str {
        match self {
            Axis::Unlabeled => "n",
            Axis::Labeled => "L",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" => Ok(Axis::Unlabeled),
            "L" => Ok(Axis::Labeled),
            other => Err(Error::InvalidParams(format!("sweep axis must be `n` or `L`, got `{other}`"))),
        }
    }
}

/// Values along one axis; empty means the default geometric grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum BetaTilde {
    /// `β − (β − (1 − γα))/4` from the effective exponents of each point.
    #[default]
    Auto,
    Fixed(f64),
}

impl FromStr for BetaTilde {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(BetaTilde::Auto),
            v => v
                .parse()
                .map(BetaTilde::Fixed)
                .map_err(|_| Error::InvalidParams(format!("beta_tilde must be `auto` or a number, got `{v}`"))),
        }
    }
}

/// Raw counts take precedence only when given; each count may instead be
/// specified through its exponent (`k` via α, `L` via β, `n` via γ).
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub p: usize,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub c1: f64,
    pub lambda: f64,
    pub labeled: Option<usize>,
    pub beta: Option<f64>,
    pub unlabeled: Option<usize>,
    pub gamma: Option<f64>,
    pub c2: f64,
    pub sweep: Option<Sweep>,
    pub methods: Vec<Method>,
    pub trials: usize,
    /// Self-training confidence threshold `Γ`.
    pub gamma_threshold: f64,
    pub beta_tilde: BetaTilde,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub f32: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: DEFAULT_P,
            k: None,
            alpha: None,
            c1: 1.0,
            lambda: DEFAULT_LAMBDA,
            labeled: None,
            beta: None,
            unlabeled: None,
            gamma: None,
            c2: 1.0,
            sweep: None,
            methods: Method::ALL.to_vec(),
            trials: DEFAULT_TRIALS,
            gamma_threshold: crate::estimators::DEFAULT_GAMMA,
            beta_tilde: BetaTilde::Auto,
            seed: 0,
            out: None,
            f32: false,
        }
    }
}

/// One `(L, n)` grid point with the sparsity shared by all points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SweepPoint {
    pub labeled: usize,
    pub unlabeled: usize,
}

fn exclusive<T>(raw: &Option<T>, exponent: &Option<f64>, names: &str) -> Result<()> {
    if raw.is_some() && exponent.is_some() {
        return Err(Error::InvalidParams(format!("{names} are mutually exclusive")));
    }
    Ok(())
}

/// `count` integers spaced geometrically from `lo` to `hi`, deduplicated.
pub fn geometric_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (lo, hi) = (lo.max(1), hi.max(lo.max(1)));
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (count.max(2) - 1) as f64);
    let mut out: Vec<usize> = (0..count.max(1))
        .map(|i| (lo as f64 * ratio.powi(i as i32)).round() as usize)
        .collect();
    out.dedup();
    out
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        exclusive(&self.k, &self.alpha, "k and alpha")?;
        exclusive(&self.labeled, &self.beta, "L and beta")?;
        exclusive(&self.unlabeled, &self.gamma, "n and gamma")?;
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be ≥ 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParams("at least one method is required".into()));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!("need finite λ > 0, got {}", self.lambda)));
        }
        if !(self.gamma_threshold >= 0.0) {
            return Err(Error::InvalidParams(format!("Γ must be ≥ 0, got {}", self.gamma_threshold)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::InvalidParams("c1 and c2 must be positive".into()));
        }
        if let BetaTilde::Fixed(b) = self.beta_tilde {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParams(format!("beta_tilde must lie in (0, 1), got {b}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParams("sweep values must be strictly increasing".into()));
            }
        }
        self.points().map(|_| ())
    }

    pub fn sparsity(&self) -> Result<usize> {
        let k = match self.k {
            Some(k) => k,
            None => sparsity_from_alpha(self.p, self.alpha.unwrap_or(DEFAULT_ALPHA), self.c1),
        };
        if k == 0 || k >= self.p {
            return Err(Error::InvalidParams(format!("need 1 ≤ k < p, got k = {k}, p = {}", self.p)));
        }
        Ok(k)
    }

    fn base_labeled(&self, k: usize) -> Result<usize> {
        match (self.labeled, self.beta) {
            (Some(l), _) => Ok(l),
            (None, Some(beta)) => labeled_from_beta(self.p, k, self.lambda, beta),
            (None, None) => Ok(DEFAULT_LABELED),
        }
    }

    fn base_unlabeled(&self, k: usize) -> Result<Option<usize>> {
        match (self.unlabeled, self.gamma) {
            (Some(n), _) => Ok(Some(n)),
            (None, Some(gamma)) => unlabeled_from_gamma(k, self.lambda, gamma, self.c2).map(Some),
            (None, None) => Ok(None),
        }
    }

    /// Sweep values, falling back to the default grid for the axis.
    pub fn sweep_values(&self) -> Result<Option<(Axis, Vec<usize>)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(None);
        };
        if !sweep.values.is_empty() {
            return Ok(Some((sweep.axis, sweep.values.clone())));
        }
        let k = self.sparsity()? as f64;
        let values = match sweep.axis {
            Axis::Unlabeled => {
                let hi = (4.0 * k * k / (self.lambda * self.lambda)).ceil() as usize;
                geometric_grid((k / self.lambda).ceil() as usize, hi.max(2), DEFAULT_GRID_POINTS)
            }
            Axis::Labeled => {
                let hi = (2.0 * k * (self.p as f64).ln() / self.lambda).ceil() as usize;
                geometric_grid(2, hi.max(2), DEFAULT_GRID_POINTS)
            }
        };
        Ok(Some((sweep.axis, values)))
    }

    /// All grid points in sweep order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let k = self.sparsity()?;
        let labeled = self.base_labeled(k)?;
        let unlabeled = self.base_unlabeled(k)?;
        match self.sweep_values()? {
            Some((Axis::Unlabeled, values)) => Ok(values
                .into_iter()
                .map(|n| SweepPoint { labeled, unlabeled: n })
                .collect()),
            Some((Axis::Labeled, values)) => {
                let unlabeled = unlabeled.ok_or_else(|| Error::InvalidParams("n or gamma is required".into()))?;
                Ok(values.into_iter().map(|l| SweepPoint { labeled: l, unlabeled }).collect())
            }
            None => {
                let unlabeled = unlabeled.ok_or_else(|| Error::InvalidParams("n or gamma is required".into()))?;
                Ok(vec![SweepPoint { labeled, unlabeled }])
            }
        }
    }
}

const KEYS: &[&str] = &[
    "p", "k", "alpha", "c1", "lambda", "L", "beta", "n", "gamma", "c2", "sweep_axis", "sweep_values", "methods",
    "trials", "Gamma", "beta_tilde", "seed", "out", "f32",
];

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value `{value}` for `{key}`"),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_value(key, v, line))
        .collect()
}

/// Parses the `key = value` format. Blank lines and `#` comments are
/// ignored; lists are comma separated.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut unknown = Vec::new();
    let mut axis: Option<Axis> = None;
    let mut values: Option<Vec<usize>> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" => cfg.p = parse_value(key, value, line)?,
            "k" => cfg.k = Some(parse_value(key, value, line)?),
            "alpha" => cfg.alpha = Some(parse_value(key, value, line)?),
            "c1" => cfg.c1 = parse_value(key, value, line)?,
            "lambda" => cfg.lambda = parse_value(key, value, line)?,
            "L" => cfg.labeled = Some(parse_value(key, value, line)?),
            "beta" => cfg.beta = Some(parse_value(key, value, line)?),
            "n" => cfg.unlabeled = Some(parse_value(key, value, line)?),
            "gamma" => cfg.gamma = Some(parse_value(key, value, line)?),
            "c2" => cfg.c2 = parse_value(key, value, line)?,
            "sweep_axis" => axis = Some(parse_value(key, value, line)?),
            "sweep_values" => values = Some(parse_list(key, value, line)?),
            "methods" => cfg.methods = parse_list(key, value, line)?,
            "trials" => cfg.trials = parse_value(key, value, line)?,
            "Gamma" => cfg.gamma_threshold = parse_value(key, value, line)?,
            "beta_tilde" => cfg.beta_tilde = parse_value(key, value, line)?,
            "seed" => cfg.seed = parse_value(key, value, line)?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "f32" => cfg.f32 = parse_value(key, value, line)?,
            _ => unknown.push(key.to_string()),
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownKeys(unknown));
    }
    cfg.sweep = match (axis, values) {
        (Some(axis), values) => Some(Sweep {
            axis,
            values: values.unwrap_or_default(),
        }),
        (None, Some(values)) => Some(Sweep {
            axis: Axis::Unlabeled,
            values,
        }),
        (None, None) => None,
    };
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub fn format_config(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let mut put = |key: &str, value: String| {
        debug_assert!(KEYS.contains(&key));
        let _ = writeln!(s, "{key} = {value}");
    };
    put("p", cfg.p.to_string());
    if let Some(k) = cfg.k {
        put("k", k.to_string());
    }
    if let Some(a) = cfg.alpha {
        put("alpha", a.to_string());
    }
    put("c1", cfg.c1.to_string());
    put("lambda", cfg.lambda.to_string());
    if let Some(l) = cfg.labeled {
        put("L", l.to_string());
    }
    if let Some(b) = cfg.beta {
        put("beta", b.to_string());
    }
    if let Some(n) = cfg.unlabeled {
        put("n", n.to_string());
    }
    if let Some(g) = cfg.gamma {
        put("gamma", g.to_string());
    }
    put("c2", cfg.c2.to_string());
    if let Some(sweep) = &cfg.sweep {
        put("sweep_axis", sweep.axis.tag().to_string());
        let values: Vec<String> = sweep.values.iter().map(usize::to_string).collect();
        put("sweep_values", values.join(", "));
    }
    let methods: Vec<&str> = cfg.methods.iter().map(|m| m.tag()).collect();
    put("methods", methods.join(", "));
    put("trials", cfg.trials.to_string());
    put("Gamma", cfg.gamma_threshold.to_string());
    put(
        "beta_tilde",
        match cfg.beta_tilde {
            BetaTilde::Auto => "auto".to_string(),
            BetaTilde::Fixed(b) => b.to_string(),
        },
    );
    put("seed", cfg.seed.to_string());
    if let Some(out) = &cfg.out {
        put("out", out.display().to_string());
    }
    put("f32", cfg.f32.to_string());
    s
}

pub fn write_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    fs::write(path, format_config(cfg)).map_err(|e| Error::io(path, e))
}
