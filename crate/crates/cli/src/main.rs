//! `sparse-ssl`: experiments and closed-form calculators for semi-supervised
//! sparse Gaussian classification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sparse_ssl::estimators::{screening_size, Method};
use sparse_ssl::gmodel::{make_sparse_mean, sample_dataset_with, write_dump, ProblemParams, SampleOptions, SupportSpec};
use sparse_ssl::harness::{
    self, failure_report, read_config, trial_seed, write_outputs, Axis, BetaTilde, ExperimentConfig, Sweep,
};
use sparse_ssl::theory::{
    fusion_verdict, lowdeg_norm_exact, lowdeg_norm_monte_carlo, lowdeg_norm_upper_bound, region_boundaries,
    region_classify, LowDegParams, RegionLabel,
};
use sparse_ssl::{par, Error, Execution, Precision};

#[derive(Parser, Debug)]
#[command(name = "sparse-ssl", version, about = "Semi-supervised sparse Gaussian classification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run all methods on one (L, n) configuration for M trials.
    Simulate(RunArgs),
    /// Run a grid over n or L.
    Sweep(SweepArgs),
    /// Classify (α, β, γ) into a phase-diagram region.
    Region(RegionArgs),
    /// Low-degree likelihood ratio norm: exact value, bounds, Monte Carlo.
    Lowdeg(LowdegArgs),
    /// Information-theoretic sample thresholds and the fused verdict.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Key-value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimension [default: 100000].
    #[arg(long)]
    p: Option<usize>,
    /// Sparsity (exclusive with --alpha) [default: ⌊c1·p^0.4⌋].
    #[arg(long, conflicts_with = "alpha")]
    k: Option<usize>,
    /// Sparsity exponent, k = ⌊c1·p^α⌋.
    #[arg(long)]
    alpha: Option<f64>,
    /// Sparsity scale c1 [default: 1].
    #[arg(long)]
    c1: Option<f64>,
    /// Signal strength ‖μ‖² [default: 3].
    #[arg(long)]
    lambda: Option<f64>,
    /// Labeled samples (exclusive with --beta) [default: 200].
    #[arg(long = "L", conflicts_with = "beta")]
    labeled: Option<usize>,
    /// Labeled exponent, L = ⌊2βk ln(p−k)/λ⌋.
    #[arg(long)]
    beta: Option<f64>,
    /// Unlabeled samples (exclusive with --gamma); required unless sweeping over n.
    #[arg(long = "n", conflicts_with = "gamma")]
    unlabeled: Option<usize>,
    /// Unlabeled exponent, n = ⌊c2·k^γ/λ²⌋.
    #[arg(long)]
    gamma: Option<f64>,
    /// Unlabeled scale c2 [default: 1].
    #[arg(long)]
    c2: Option<f64>,
    /// Screening exponent in (0, 1) or `auto` [default: auto].
    #[arg(long = "beta-tilde")]
    beta_tilde: Option<BetaTildeArg>,
    /// Self-training threshold Γ [default: 0.8].
    #[arg(long = "Gamma")]
    gamma_threshold: Option<f64>,
    /// Comma-separated method tags [default: all].
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Trials M per point [default: 50].
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Per-trial CSV; `<stem>.summary.csv` and `<stem>.meta.txt` are written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Store samples as f32 (metrics stay f64).
    #[arg(long = "f32")]
    f32: bool,
    /// Write the dataset of trial 0 at the first point to this binary file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Axis to sweep: `n` or `L` [default: n].
    #[arg(long = "sweep-axis")]
    axis: Option<Axis>,
    /// Strictly increasing comma-separated values [default: geometric grid].
    #[arg(long = "sweep-values", value_delimiter = ',')]
    values: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
struct BetaTildeArg(BetaTilde);

impl std::str::FromStr for BetaTildeArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.parse().map(BetaTildeArg)
    }
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Sparsity exponent in (0, 1/2).
    #[arg(long)]
    alpha: f64,
    /// Labeled exponent.
    #[arg(long)]
    beta: f64,
    /// Unlabeled exponent.
    #[arg(long)]
    gamma: f64,
}

#[derive(Args, Debug)]
struct LowdegArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    k: usize,
    /// Labeled samples.
    #[arg(long = "L")]
    labeled: usize,
    /// Unlabeled samples.
    #[arg(long = "n")]
    unlabeled: usize,
    #[arg(long)]
    lambda: f64,
    /// Maximum polynomial degree.
    #[arg(long = "D")]
    degree: usize,
    /// Sparsity exponent for the closed-form bound [default: ln k / ln p].
    #[arg(long)]
    alpha: Option<f64>,
    /// Labeled exponent for the bound [default: Lλ/(2k ln(p−k))].
    #[arg(long)]
    beta: Option<f64>,
    /// Unlabeled exponent for the hardness conditions [default: ln(nλ²)/ln k].
    #[arg(long)]
    gamma: Option<f64>,
    /// Slack ε [default: 1/2 − α − β if positive, else the smallest certifying value].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo draws used when the exact sum is infeasible.
    #[arg(long = "mc-samples", default_value_t = 100_000)]
    mc_samples: usize,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    lambda: f64,
    /// Confidence parameter δ ∈ [0, 1).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Labeled samples for the fused verdict.
    #[arg(long = "L", default_value_t = 0)]
    labeled: usize,
    /// Unlabeled samples for the fused verdict.
    #[arg(long = "n", default_value_t = 0)]
    unlabeled: usize,
}

/// Shortest decimal with at most ten fractional digits; scientific outside [1e-6, 1e9).
fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x != 0.0 && !(1e-6..1e9).contains(&x.abs()) {
        return format!("{x:.6e}");
    }
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Aligned `key: value` lines.
#[derive(Default)]
struct Report(Vec<(String, String)>);

impl Report {
    fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    fn print(&self) {
        let width = self.0.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.0 {
            let pad = width - k.chars().count();
            println!("{k}{}: {v}", " ".repeat(pad));
        }
    }
}

fn apply(run: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &run.config {
        Some(path) => read_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = run.p {
        cfg.p = p;
    }
    if let Some(k) = run.k {
        cfg.k = Some(k);
        cfg.alpha = None;
    }
    if let Some(a) = run.alpha {
        cfg.alpha = Some(a);
        cfg.k = None;
    }
    if let Some(c1) = run.c1 {
        cfg.c1 = c1;
    }
    if let Some(l) = run.lambda {
        cfg.lambda = l;
    }
    if let Some(l) = run.labeled {
        cfg.labeled = Some(l);
        cfg.beta = None;
    }
    if let Some(b) = run.beta {
        cfg.beta = Some(b);
        cfg.labeled = None;
    }
    if let Some(n) = run.unlabeled {
        cfg.unlabeled = Some(n);
        cfg.gamma = None;
    }
    if let Some(g) = run.gamma {
        cfg.gamma = Some(g);
        cfg.unlabeled = None;
    }
    if let Some(c2) = run.c2 {
        cfg.c2 = c2;
    }
    if let Some(BetaTildeArg(b)) = run.beta_tilde {
        cfg.beta_tilde = b;
    }
    if let Some(g) = run.gamma_threshold {
        cfg.gamma_threshold = g;
    }
    if let Some(m) = &run.methods {
        cfg.methods = m.clone();
    }
    if let Some(t) = run.trials {
        cfg.trials = t;
    }
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    if let Some(o) = &run.out {
        cfg.out = Some(o.clone());
    }
    cfg.f32 |= run.f32;
    Ok(cfg)
}

fn experiment(cfg: &ExperimentConfig, run: &RunArgs) -> Result<ExitCode, Error> {
    cfg.validate()?;
    let k = cfg.sparsity()?;
    let points = cfg.points()?;
    let mut head = Report::default();
    head.put("p", cfg.p)
        .put("k", k)
        .put("lambda", num(cfg.lambda))
        .put("trials", cfg.trials)
        .put("seed", cfg.seed)
        .put("methods", cfg.methods.iter().map(|m| m.tag()).collect::<Vec<_>>().join(","));
    match cfg.beta_tilde {
        BetaTilde::Auto => head.put("beta_tilde", "auto"),
        BetaTilde::Fixed(b) => head.put("beta_tilde", num(b)).put("screening_size", screening_size(cfg.p, b)),
    };
    head.print();

    if let Some(path) = &run.dump {
        let pt = points[0];
        let params = ProblemParams::new(cfg.p, k, cfg.lambda, pt.labeled, pt.unlabeled, trial_seed(cfg.seed, 0))?;
        let mu = make_sparse_mean(&params, &SupportSpec::Random)?;
        let opts = SampleOptions {
            precision: if cfg.f32 { Precision::F32 } else { Precision::F64 },
            exec: Execution::default(),
        };
        let data = sample_dataset_with(&mu, pt.labeled, pt.unlabeled, params.seed, opts)?;
        write_dump(&data, path)?;
        println!("dump: {}", path.display());
    }

    let result = par::with_threads(run.threads, || harness::run_sweep(cfg))?;
    for pt in &points {
        let mut r = Report::default();
        r.put("L", pt.labeled).put("n", pt.unlabeled);
        for &m in &cfg.methods {
            if let Some(a) = result.aggregate(m, *pt) {
                r.put(
                    m.tag(),
                    format!(
                        "overlap={} (sd {}) gen_error={} (sd {}) excess_risk={} (sd {}) failed={}/{}",
                        num(a.overlap.0),
                        num(a.overlap.1),
                        num(a.gen_error.0),
                        num(a.gen_error.1),
                        num(a.excess_risk.0),
                        num(a.excess_risk.1),
                        a.failed,
                        a.trials
                    ),
                );
            }
        }
        r.print();
    }
    if let Some(out) = &cfg.out {
        let (summary, meta) = write_outputs(&result, cfg, out)?;
        let mut r = Report::default();
        r.put("csv", out.display()).put("summary", summary.display()).put("meta", meta.display());
        r.print();
    }
    match failure_report(&result.records) {
        Some(report) => {
            eprintln!("{} of {} trials failed:\n{report}", result.failures(), result.records.len());
            Ok(ExitCode::from(3))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn simulate(run: &RunArgs) -> Result<ExitCode, Error> {
    let mut cfg = apply(run)?;
    cfg.sweep = None;
    experiment(&cfg, run)
}

fn sweep(args: &SweepArgs) -> Result<ExitCode, Error> {
    let mut cfg = apply(&args.run)?;
    let mut sweep = cfg.sweep.take().unwrap_or(Sweep {
        axis: Axis::Unlabeled,
        values: Vec::new(),
    });
    if let Some(axis) = args.axis {
        if axis != sweep.axis {
            sweep.values.clear();
        }
        sweep.axis = axis;
    }
    if let Some(values) = &args.values {
        sweep.values = values.clone();
    }
    cfg.sweep = Some(sweep);
    experiment(&cfg, &args.run)
}

fn region(args: &RegionArgs) -> Result<ExitCode, Error> {
    let (a, b, g) = (args.alpha, args.beta, args.gamma);
    let label = region_classify(a, b, g)?;
    let bd = region_boundaries(a, g);
    let why = match label {
        RegionLabel::SlEasy => format!("β={} > 1−α={}", num(b), num(bd.sl)),
        RegionLabel::UlEasy => format!("γ={} ≥ 2", num(g)),
        RegionLabel::SslEasyBlue => format!("1−γα={} < β={} < 1−α={}", num(bd.ssl), num(b), num(bd.sl)),
        RegionLabel::HardOrange => format!("β={} < 1/2−α={}, 1 < γ={} < 2", num(b), num(bd.hard), num(g)),
        RegionLabel::ImpossibleRed => format!("γ={} ≤ 1, β={} < 1−α={}", num(g), num(b), num(bd.sl)),
        RegionLabel::UnknownWhite => "no characterized region applies".to_string(),
    };
    let mut r = Report::default();
    r.put("region", format!("{label} ({why})"))
        .put("1−α", num(bd.sl))
        .put("1−γα", num(bd.ssl))
        .put("1/2−α", num(bd.hard));
    r.print();
    Ok(ExitCode::SUCCESS)
}

fn lowdeg(args: &LowdegArgs) -> Result<ExitCode, Error> {
    let params = LowDegParams {
        p: args.p,
        k: args.k,
        labeled: args.labeled,
        unlabeled: args.unlabeled,
        lambda: args.lambda,
        degree: args.degree,
    };
    params.validate()?;
    let (pf, kf) = (args.p as f64, args.k as f64);
    let alpha = args.alpha.unwrap_or(kf.ln() / pf.ln());
    let beta = args
        .beta
        .unwrap_or(args.labeled as f64 * args.lambda / (2.0 * kf * (pf - kf).ln()));
    let gamma = args
        .gamma
        .unwrap_or((args.unlabeled as f64 * args.lambda * args.lambda).ln() / kf.ln());

    let mut r = Report::default();
    r.put("p", args.p)
        .put("k", args.k)
        .put("L", args.labeled)
        .put("n", args.unlabeled)
        .put("lambda", num(args.lambda))
        .put("D", args.degree)
        .put("alpha", num(alpha))
        .put("beta", num(beta))
        .put("gamma", num(gamma));
    match lowdeg_norm_exact(&params) {
        Ok(v) => {
            r.put("exact", num(v));
        }
        Err(Error::ExactInfeasible(msg)) => {
            eprintln!("warning: {msg}");
            let mc = lowdeg_norm_monte_carlo(&params, args.mc_samples, args.seed, Execution::default())?;
            r.put("monte_carlo", format!("{} ± {} (n = {})", num(mc.mean), num(mc.std_error), mc.samples));
        }
        Err(e) => return Err(e),
    }
    match lowdeg_norm_upper_bound(&params, alpha, beta, args.epsilon) {
        Ok(b) => {
            r.put("bound", num(b.closed_form))
                .put("bound_per_degree", num(b.per_degree))
                .put("epsilon", num(b.epsilon))
                .put("epsilon_needed", num(b.epsilon_needed))
                .put("bound_certified", b.certified);
        }
        Err(Error::BoundInapplicable(msg)) => {
            r.put("bound", format!("inapplicable ({msg})"));
        }
        Err(e) => return Err(e),
    }
    let holds = alpha > 0.0 && alpha < 0.5 && beta < 0.5 - alpha && gamma < 2.0;
    r.put("hardness_conditions", if holds { "hold (α < 1/2, β < 1/2−α, γ < 2)" } else { "fail" });
    r.print();
    Ok(ExitCode::SUCCESS)
}

fn bounds(args: &BoundsArgs) -> Result<ExitCode, Error> {
    let (l, n) = (args.labeled as f64, args.unlabeled as f64);
    let report = fusion_verdict(l, n, args.k, args.lambda, args.p, args.delta)?;
    let mut r = Report::default();
    r.put("p", args.p)
        .put("k", args.k)
        .put("lambda", num(args.lambda))
        .put("delta", num(args.delta))
        .put("sl_max_L", num(report.sl_max_l))
        .put("ul_max_n", num(report.ul_max_n))
        .put("L", args.labeled)
        .put("n", args.unlabeled)
        .put("load", num(report.load))
        .put("q", num(report.q))
        .put("verdict", report.verdict);
    r.print();
    println!("p,k,lambda,delta,sl_max_L,ul_max_n,L,n,load,q,verdict");
    println!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        args.p,
        args.k,
        args.lambda,
        args.delta,
        report.sl_max_l,
        report.ul_max_n,
        args.labeled,
        args.unlabeled,
        report.load,
        report.q,
        report.verdict
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Region(a) => region(a),
        Command::Lowdeg(a) => lowdeg(a),
        Command::Bounds(a) => bounds(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
