//! Seeded Monte Carlo experiments: one dataset per (grid point, trial),
//! every configured method run on it, metrics from the closed-form error.
//!
//! The data seed of trial `t` is `mix(mix(seed, TRIAL), t)`. It depends on
//! neither the method nor the grid point, and datasets extend by prefix as
//! `L` or `n` grows, so all methods and points within a trial see common
//! random numbers.

mod config;
mod csv;

use std::time::Instant;

pub use config::{
    format_config, geometric_grid, parse_config, read_config, write_config, Axis, BetaTilde, ExperimentConfig, Sweep,
    SweepPoint, DEFAULT_ALPHA, DEFAULT_GRID_POINTS, DEFAULT_LABELED, DEFAULT_LAMBDA, DEFAULT_P, DEFAULT_TRIALS,
};
pub use csv::{format_csv, format_summary, write_csv, write_meta, write_outputs, write_summary, CSV_HEADER, SUMMARY_HEADER};

use crate::error::Result;
use crate::estimators::{
    auto_beta_tilde, lspca, self_train, top_k_labeled, ul_diag_threshold_pca, vanilla_pca, EstimatorOutput,
    LspcaConfig, Method, SpectralOptions,
};
use crate::gmodel::{make_sparse_mean, sample_dataset_with, Dataset, ProblemParams, SampleOptions, Scales, SparseMean, SupportSpec};
use crate::matrix::Precision;
use crate::metrics::{excess_risk, generalization_error, support_overlap};
use crate::par::Execution;
use crate::rng::{mix, stream};

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub p: usize,
    pub k: usize,
    pub lambda: f64,
    pub labeled: usize,
    pub unlabeled: usize,
    pub trial: usize,
    pub seed: u64,
    /// NaN when the estimator failed.
    pub overlap: f64,
    pub gen_error: f64,
    pub excess_risk: f64,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// Equality ignoring the runtime column.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        let eq = |a: f64, b: f64| a == b || (a.is_nan() && b.is_nan());
        self.method == other.method
            && (self.p, self.k, self.labeled, self.unlabeled, self.trial, self.seed)
                == (other.p, other.k, other.labeled, other.unlabeled, other.trial, other.seed)
            && self.lambda == other.lambda
            && eq(self.overlap, other.overlap)
            && eq(self.gen_error, other.gen_error)
            && eq(self.excess_risk, other.excess_risk)
            && self.error == other.error
    }
}

/// Mean and sample standard deviation (`M − 1` denominator; 0 for a single
/// value) over the successful trials of one `(method, point)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub method: Method,
    pub labeled: usize,
    pub unlabeled: usize,
    pub trials: usize,
    pub failed: usize,
    pub overlap: (f64, f64),
    pub gen_error: (f64, f64),
    pub excess_risk: (f64, f64),
    pub runtime_ms: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }

    pub fn aggregate(&self, method: Method, point: SweepPoint) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.labeled == point.labeled && a.unlabeled == point.unlabeled)
    }
}

pub fn trial_seed(master: u64, trial: usize) -> u64 {
    mix(mix(master, stream::TRIAL), trial as u64)
}

fn precision(cfg: &ExperimentConfig) -> Precision {
    if cfg.f32 {
        Precision::F32
    } else {
        Precision::F64
    }
}

fn problem(cfg: &ExperimentConfig, point: SweepPoint, trial: usize) -> Result<ProblemParams> {
    ProblemParams::new(cfg.p, cfg.sparsity()?, cfg.lambda, point.labeled, point.unlabeled, trial_seed(cfg.seed, trial))
}

fn draw(cfg: &ExperimentConfig, params: &ProblemParams, exec: Execution) -> Result<(SparseMean, Dataset)> {
    let mu = make_sparse_mean(params, &SupportSpec::Random)?;
    let opts = SampleOptions {
        precision: precision(cfg),
        exec,
    };
    let data = sample_dataset_with(&mu, params.labeled, params.unlabeled, params.seed, opts)?;
    Ok((mu, data))
}

fn beta_tilde(cfg: &ExperimentConfig, params: &ProblemParams) -> Result<f64> {
    match cfg.beta_tilde {
        BetaTilde::Fixed(b) => Ok(b),
        BetaTilde::Auto => auto_beta_tilde(params.exponents(Scales { c1: cfg.c1, c2: cfg.c2 })?),
    }
}

/// Runs one estimator on a dataset. Label-free methods see all `L + n`
/// vectors.
pub fn run_method(
    method: Method,
    cfg: &ExperimentConfig,
    params: &ProblemParams,
    data: &Dataset,
    exec: Execution,
) -> Result<EstimatorOutput> {
    let k = params.k;
    let opts = SpectralOptions {
        exec,
        ..SpectralOptions::default()
    };
    match method {
        Method::TopKLabeled => top_k_labeled(data, k),
        Method::Lspca | Method::Ls2pca => {
            let lcfg = LspcaConfig {
                k,
                beta_tilde: beta_tilde(cfg, params)?,
                sparse_pca: method == Method::Ls2pca,
            };
            lspca(data, &lcfg, &opts)
        }
        Method::SelfTrain => self_train(data, k, cfg.gamma_threshold),
        Method::UlDiagPca => ul_diag_threshold_pca(data.all(), k, &opts),
        Method::VanillaPca => vanilla_pca(data.all(), k, &opts),
    }
}

fn evaluate(
    method: Method,
    cfg: &ExperimentConfig,
    params: &ProblemParams,
    trial: usize,
    drawn: &Result<(SparseMean, Dataset)>,
    exec: Execution,
) -> TrialRecord {
    let start = Instant::now();
    let score = |mu: &SparseMean, data: &Dataset| -> Result<(f64, f64, f64)> {
        let out = run_method(method, cfg, params, data, exec)?;
        out.check(params.p, params.k)?;
        Ok((
            support_overlap(mu.support(), &out.support, params.k)?,
            generalization_error(mu, &out.direction)?,
            excess_risk(mu, &out.direction)?,
        ))
    };
    let outcome = match drawn {
        Ok((mu, data)) => score(mu, data).map_err(|e| e.to_string()),
        Err(e) => Err(e.to_string()),
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let (overlap, gen_error, excess, error) = match outcome {
        Ok((o, g, e)) => (o, g, e, None),
        Err(e) => (f64::NAN, f64::NAN, f64::NAN, Some(e)),
    };
    TrialRecord {
        method,
        p: params.p,
        k: params.k,
        lambda: params.lambda,
        labeled: params.labeled,
        unlabeled: params.unlabeled,
        trial,
        seed: params.seed,
        overlap,
        gen_error,
        excess_risk: excess,
        runtime_ms,
        error,
    }
}

/// A single `(method, point, trial)` cell, generating its own dataset.
pub fn run_trial(cfg: &ExperimentConfig, method: Method, point: SweepPoint, trial: usize) -> Result<TrialRecord> {
    let params = problem(cfg, point, trial)?;
    let exec = Execution::default();
    let drawn = draw(cfg, &params, exec);
    Ok(evaluate(method, cfg, &params, trial, &drawn, exec))
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, Execution::default())
}

/// All `trials × points × methods` cells. `(point, trial)` tasks run in
/// parallel; records are returned sorted by (method, point, trial).
pub fn run_sweep_with(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepResult> {
    cfg.validate()?;
    let points = cfg.points()?;
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pi| (0..cfg.trials).map(move |t| (pi, t)))
        .collect();
    let per_task: Vec<Result<Vec<TrialRecord>>> = exec.map(tasks.len(), |i| {
        let (pi, trial) = tasks[i];
        let params = problem(cfg, points[pi], trial)?;
        let drawn = draw(cfg, &params, exec);
        Ok(cfg
            .methods
            .iter()
            .map(|&m| evaluate(m, cfg, &params, trial, &drawn, exec))
            .collect())
    });

    let mut keyed = Vec::with_capacity(tasks.len() * cfg.methods.len());
    for (&(pi, trial), records) in tasks.iter().zip(per_task) {
        for (mi, record) in records?.into_iter().enumerate() {
            keyed.push(((mi, pi, trial), record));
        }
    }
    keyed.sort_by_key(|(key, _)| *key);
    let records: Vec<TrialRecord> = keyed.into_iter().map(|(_, r)| r).collect();
    let aggregates = aggregate(&records);
    Ok(SweepResult { records, aggregates })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

/// Groups consecutive records sharing `(method, L, n)`, in record order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for group in records.chunk_by(|a, b| (a.method, a.labeled, a.unlabeled) == (b.method, b.labeled, b.unlabeled)) {
        let ok: Vec<&TrialRecord> = group.iter().filter(|r| !r.failed()).collect();
        let col = |f: fn(&TrialRecord) -> f64| mean_std(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
        out.push(Aggregate {
            method: group[0].method,
            labeled: group[0].labeled,
            unlabeled: group[0].unlabeled,
            trials: group.len(),
            failed: group.len() - ok.len(),
            overlap: col(|r| r.overlap),
            gen_error: col(|r| r.gen_error),
            excess_risk: col(|r| r.excess_risk),
            runtime_ms: col(|r| r.runtime_ms),
        });
    }
    out
}

/// Summary of failed trials, one line each.
pub fn failure_report(records: &[TrialRecord]) -> Option<String> {
    let lines: Vec<String> = records
        .iter()
        .filter_map(|r| {
            r.error.as_ref().map(|e| {
                format!("{} L={} n={} trial={}: {e}", r.method, r.labeled, r.unlabeled, r.trial)
            })
        })
        .collect();
    (!lines.is_empty()).then(|| lines.join("\n"))
}
