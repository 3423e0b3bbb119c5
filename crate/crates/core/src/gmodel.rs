//! The symmetric sparse Gaussian mixture
//!
//! ```text
//! y ~ Unif{−1, +1},    x | y ~ N(y·μ, I_p),
//! ```
//!
//! where `μ` has exactly `k` nonzero entries, each `±√(λ/k)`, so that
//! `‖μ‖² = λ`. Datasets hold `L` labeled and `n` unlabeled draws.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Precision, Rows};
use crate::par::Execution;
use crate::rng::{mix, stream, stream_rng};

/// Relative slack applied before rounding so that e.g. `(10⁵)^0.4`, which
/// evaluates to `99.999…`, floors to 100.
const ROUNDING_SLACK: f64 = 1e-9;

pub(crate) fn floor_count(x: f64) -> usize {
    (x + ROUNDING_SLACK * x.abs().max(1.0)).floor().max(0.0) as usize
}

pub(crate) fn ceil_count(x: f64) -> usize {
    (x - ROUNDING_SLACK * x.abs().max(1.0)).ceil().max(0.0) as usize
}

/// Phase-diagram coordinates `(α, β, γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Multiplicative constants `c₁` (sparsity) and `c₂` (unlabeled count).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scales {
    pub c1: f64,
    pub c2: f64,
}

impl Default for Scales {
    fn default() -> Self {
        Scales { c1: 1.0, c2: 1.0 }
    }
}

/// `k = ⌊c₁ p^α⌋`.
pub fn sparsity_from_alpha(p: usize, alpha: f64, c1: f64) -> usize {
    floor_count(c1 * (p as f64).powf(alpha))
}

/// `L = ⌊2βk log(p−k) / λ⌋`.
pub fn labeled_from_beta(p: usize, k: usize, lambda: f64, beta: f64) -> Result<usize> {
    if lambda <= 0.0 {
        return Err(Error::InvalidParams("β-scaled L needs λ > 0".into()));
    }
    if p <= k + 1 {
        return Err(Error::InvalidParams("β-scaled L needs p − k ≥ 2".into()));
    }
    Ok(floor_count(2.0 * beta * k as f64 * ((p - k) as f64).ln() / lambda))
}

/// `n = ⌊c₂ k^γ / λ²⌋`.
pub fn unlabeled_from_gamma(k: usize, lambda: f64, gamma: f64, c2: f64) -> Result<usize> {
    if lambda <= 0.0 {
        return Err(Error::InvalidParams("γ-scaled n needs λ > 0".into()));
    }
    Ok(floor_count(c2 * (k as f64).powf(gamma) / (lambda * lambda)))
}

/// The experiment coordinates `(p, k, λ, L, n)` and master seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemParams {
    pub p: usize,
    pub k: usize,
    pub lambda: f64,
    pub labeled: usize,
    pub unlabeled: usize,
    pub seed: u64,
}

impl ProblemParams {
    pub fn new(p: usize, k: usize, lambda: f64, labeled: usize, unlabeled: usize, seed: u64) -> Result<Self> {
        let params = ProblemParams {
            p,
            k,
            lambda,
            labeled,
            unlabeled,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds counts from exponents: `k = ⌊c₁p^α⌋`, `L = ⌊2βk log(p−k)/λ⌋`,
    /// `n = ⌊c₂k^γ/λ²⌋`.
    pub fn from_exponents(p: usize, lambda: f64, exps: Exponents, scales: Scales, seed: u64) -> Result<Self> {
        let k = sparsity_from_alpha(p, exps.alpha, scales.c1);
        let labeled = labeled_from_beta(p, k, lambda, exps.beta)?;
        let unlabeled = unlabeled_from_gamma(k, lambda, exps.gamma, scales.c2)?;
        Self::new(p, k, lambda, labeled, unlabeled, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.p {
            return Err(Error::InvalidParams(format!(
                "need 1 ≤ k ≤ p, got k = {}, p = {}",
                self.k, self.p
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!("need finite λ ≥ 0, got {}", self.lambda)));
        }
        if self.labeled + self.unlabeled == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(())
    }

    /// Effective exponents of the actual counts, inverting the constructors
    /// of [`ProblemParams::from_exponents`] without the floors.
    pub fn exponents(&self, scales: Scales) -> Result<Exponents> {
        if self.lambda <= 0.0 || self.p <= self.k + 1 || self.k < 2 {
            return Err(Error::InvalidParams(
                "exponents need λ > 0, k ≥ 2 and p − k ≥ 2".into(),
            ));
        }
        let (p, k) = (self.p as f64, self.k as f64);
        let alpha = (k / scales.c1).ln() / p.ln();
        let beta = self.labeled as f64 * self.lambda / (2.0 * k * (p - k).ln());
        let gamma = if self.unlabeled == 0 {
            0.0
        } else {
            (self.unlabeled as f64 * self.lambda * self.lambda / scales.c2).ln() / k.ln()
        };
        Ok(Exponents { alpha, beta, gamma })
    }
}

/// How the support of `μ` is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportSpec {
    /// Uniform support and i.i.d. uniform signs from the params' seed.
    Random,
    /// A given support (indices in `0..p`) and signs (±1).
    Fixed { support: Vec<usize>, signs: Vec<i8> },
}

/// The k-sparse mean vector, stored as support plus signs.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMean {
    p: usize,
    support: Vec<usize>,
    signs: Vec<i8>,
    magnitude: f64,
    lambda: f64,
}

pub fn make_sparse_mean(params: &ProblemParams, spec: &SupportSpec) -> Result<SparseMean> {
    params.validate()?;
    let (p, k) = (params.p, params.k);
    let (support, signs) = match spec {
        SupportSpec::Random => {
            let mut rng = stream_rng(params.seed, stream::MEAN);
            let mut support = index::sample(&mut rng, p, k).into_vec();
            support.sort_unstable();
            let signs = (0..k).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            (support, signs)
        }
        SupportSpec::Fixed { support, signs } => {
            if support.len() != k || signs.len() != k {
                return Err(Error::InvalidSupport(format!(
                    "expected {k} indices and signs, got {} and {}",
                    support.len(),
                    signs.len()
                )));
            }
            if let Some(&j) = support.iter().find(|&&j| j >= p) {
                return Err(Error::InvalidSupport(format!("index {j} out of range 0..{p}")));
            }
            if signs.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::InvalidSupport("signs must be ±1".into()));
            }
            let mut pairs: Vec<(usize, i8)> = support.iter().copied().zip(signs.iter().copied()).collect();
            pairs.sort_unstable_by_key(|&(j, _)| j);
            if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidSupport("duplicate indices".into()));
            }
            pairs.into_iter().unzip()
        }
    };
    Ok(SparseMean {
        p,
        support,
        signs,
        magnitude: (params.lambda / k as f64).sqrt(),
        lambda: params.lambda,
    })
}

impl SparseMean {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Sorted support indices.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support
            .iter()
            .zip(&self.signs)
            .map(move |(&j, &s)| (j, s as f64 * self.magnitude))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.p];
        for (j, v) in self.entries() {
            out[j] = v;
        }
        out
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries().map(|(j, v)| v * x[j]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries().map(|(_, v)| v * v).sum()
    }
}

/// `L` labeled pairs followed by `n` unlabeled vectors, stored as one
/// row-major matrix (labeled rows first).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    labels: Vec<i8>,
    rows: Matrix,
}

impl Dataset {
    /// Assembles a dataset from explicit samples. Any labeled/unlabeled
    /// vectors are accepted (not only draws from the symmetric model).
    pub fn from_parts(p: usize, labeled: &[(Vec<f64>, i8)], unlabeled: &[Vec<f64>]) -> Result<Self> {
        if labeled.is_empty() && unlabeled.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut data = Vec::with_capacity((labeled.len() + unlabeled.len()) * p);
        let mut labels = Vec::with_capacity(labeled.len());
        for (x, y) in labeled {
            if *y != 1 && *y != -1 {
                return Err(Error::InvalidParams(format!("label {y} not in {{−1, +1}}")));
            }
            labels.push(*y);
            data.extend_from_slice(x);
        }
        for x in unlabeled {
            data.extend_from_slice(x);
        }
        if data.len() != (labeled.len() + unlabeled.len()) * p {
            return Err(Error::InvalidParams(format!("all vectors must have dimension {p}")));
        }
        Ok(Dataset {
            labels,
            rows: Matrix::from_row_major(labeled.len() + unlabeled.len(), p, data),
        })
    }

    pub fn p(&self) -> usize {
        self.rows.cols()
    }

    pub fn labeled_len(&self) -> usize {
        self.labels.len()
    }

    pub fn unlabeled_len(&self) -> usize {
        self.rows.rows() - self.labels.len()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn labeled(&self) -> Rows<'_> {
        self.rows.slice(0..self.labels.len())
    }

    pub fn unlabeled(&self) -> Rows<'_> {
        self.rows.slice(self.labels.len()..self.rows.rows())
    }

    /// All `L + n` vectors, labels dropped.
    pub fn all(&self) -> Rows<'_> {
        self.rows.view()
    }

    pub fn precision(&self) -> Precision {
        self.rows.precision()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SampleOptions {
    pub precision: Precision,
    pub exec: Execution,
}

/// Draws `L` labeled and `n` unlabeled samples.
pub fn sample_dataset(mu: &SparseMean, labeled: usize, unlabeled: usize, seed: u64) -> Result<Dataset> {
    sample_dataset_with(mu, labeled, unlabeled, seed, SampleOptions::default())
}

/// Like [`sample_dataset`]. Row `i` of each block is drawn from its own
/// stream `mix(mix(seed, block), i)`, so the output depends only on the
/// arguments and a larger `L` or `n` extends rather than reshuffles the data.
pub fn sample_dataset_with(
    mu: &SparseMean,
    labeled: usize,
    unlabeled: usize,
    seed: u64,
    opts: SampleOptions,
) -> Result<Dataset> {
    if labeled + unlabeled == 0 {
        return Err(Error::EmptyDataset);
    }
    let p = mu.p();
    let labeled_seed = mix(seed, stream::LABELED);
    let unlabeled_seed = mix(seed, stream::UNLABELED);
    let row_rng = |i: usize| {
        if i < labeled {
            stream_rng(labeled_seed, i as u64)
        } else {
            stream_rng(unlabeled_seed, (i - labeled) as u64)
        }
    };
    let labels: Vec<i8> = (0..labeled)
        .map(|i| if row_rng(i).random::<bool>() { 1 } else { -1 })
        .collect();
    let mut rows = Matrix::zeros(labeled + unlabeled, p, opts.precision);
    rows.fill_rows(opts.exec, |i, row| {
        let mut rng = row_rng(i);
        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
        for v in row.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for (j, m) in mu.entries() {
            row[j] += y * m;
        }
    });
    Ok(Dataset { labels, rows })
}

const DUMP_MAGIC: &[u8; 4] = b"SSLD";
const DUMP_VERSION: u32 = 1;

/// Writes the binary dump: header `"SSLD"`, `u32` version, `u64` p, `u64` L,
/// `u64` n (all little-endian), then the `L` labeled rows and the `n`
/// unlabeled rows as `f64`, then the `L` labels as `i8`.
pub fn write_dump(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(DUMP_MAGIC).map_err(io)?;
    w.write_all(&DUMP_VERSION.to_le_bytes()).map_err(io)?;
    for v in [dataset.p(), dataset.labeled_len(), dataset.unlabeled_len()] {
        w.write_all(&(v as u64).to_le_bytes()).map_err(io)?;
    }
    for row in dataset.all().iter() {
        for j in 0..row.len() {
            w.write_all(&row.get(j).to_le_bytes()).map_err(io)?;
        }
    }
    for &y in dataset.labels() {
        w.write_all(&y.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_dump(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io = |e| Error::io(path, e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    let mut word = [0u8; 4];
    r.read_exact(&mut word).map_err(io)?;
    if &magic != DUMP_MAGIC || u32::from_le_bytes(word) != DUMP_VERSION {
        return Err(Error::Parse {
            line: 0,
            message: format!("{} is not a version-{DUMP_VERSION} SSLD dump", path.display()),
        });
    }
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf).map_err(io)?;
        *d = u64::from_le_bytes(buf) as usize;
    }
    let [p, labeled, unlabeled] = dims;
    let mut data = vec![0.0; (labeled + unlabeled) * p];
    let mut buf = [0u8; 8];
    for v in data.iter_mut() {
        r.read_exact(&mut buf).map_err(io)?;
        *v = f64::from_le_bytes(buf);
    }
    let mut labels = vec![0i8; labeled];
    for y in labels.iter_mut() {
        let mut b = [0u8; 1];
        r.read_exact(&mut b).map_err(io)?;
        *y = i8::from_le_bytes(b);
    }
    Ok(Dataset {
        labels,
        rows: Matrix::from_row_major(labeled + unlabeled, p, data),
    })
}
