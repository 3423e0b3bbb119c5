//! CSV output: per-trial records, per-cell summary and a metadata sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{format_config, ExperimentConfig};
use super::{Aggregate, SweepResult, TrialRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "method,p,k,lambda,L,n,trial,seed,overlap,gen_error,excess_risk,runtime_ms,failed";
pub const SUMMARY_HEADER: &str = "method,p,k,lambda,L,n,trials,failed,overlap_mean,overlap_std,gen_error_mean,\
gen_error_std,excess_risk_mean,excess_risk_std,runtime_ms_mean,runtime_ms_std";

fn to_text(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| w.write_record(rec).expect("writing to memory");
    write(&mut w, &header.split(',').map(String::from).collect::<Vec<_>>());
    for row in rows {
        write(&mut w, &row);
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}

pub fn format_csv(records: &[TrialRecord]) -> String {
    let rows = records.iter().map(|r| {
        vec![
            r.method.to_string(),
            r.p.to_string(),
            r.k.to_string(),
            r.lambda.to_string(),
            r.labeled.to_string(),
            r.unlabeled.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.overlap.to_string(),
            r.gen_error.to_string(),
            r.excess_risk.to_string(),
            format!("{:.3}", r.runtime_ms),
            u8::from(r.failed()).to_string(),
        ]
    });
    to_text(CSV_HEADER, rows)
}

pub fn format_summary(aggregates: &[Aggregate], cfg: &ExperimentConfig) -> Result<String> {
    let k = cfg.sparsity()?;
    let rows = aggregates.iter().map(|a| {
        vec![
            a.method.to_string(),
            cfg.p.to_string(),
            k.to_string(),
            cfg.lambda.to_string(),
            a.labeled.to_string(),
            a.unlabeled.to_string(),
            a.trials.to_string(),
            a.failed.to_string(),
            a.overlap.0.to_string(),
            a.overlap.1.to_string(),
            a.gen_error.0.to_string(),
            a.gen_error.1.to_string(),
            a.excess_risk.0.to_string(),
            a.excess_risk.1.to_string(),
            format!("{:.3}", a.runtime_ms.0),
            format!("{:.3}", a.runtime_ms.1),
        ]
    });
    Ok(to_text(SUMMARY_HEADER, rows))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write(path, &format_csv(records))
}

pub fn write_summary(aggregates: &[Aggregate], cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    write(path, &format_summary(aggregates, cfg)?)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn write_meta(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# resolved");
    let _ = writeln!(s, "# k = {}", cfg.sparsity()?);
    for pt in cfg.points()? {
        let _ = writeln!(s, "# point L = {}, n = {}", pt.labeled, pt.unlabeled);
    }
    let _ = writeln!(s, "# data seed of trial t: mix(mix(seed, 4), t), mix(a, b) = splitmix64(a ^ splitmix64(b))");
    let _ = writeln!(s, "# std columns: sample standard deviation, M - 1 denominator, 0 for M = 1");
    let _ = writeln!(s, "# failed rows carry NaN metrics and are excluded from the summary");
    s.push_str(&format_config(cfg));
    write(path, &s)
}

/// Writes `<out>`, `<stem>.summary.csv` and `<stem>.meta.txt`; returns the
/// sidecar paths.
pub fn write_outputs(result: &SweepResult, cfg: &ExperimentConfig, out: &Path) -> Result<(PathBuf, PathBuf)> {
    write_csv(&result.records, out)?;
    let summary = sidecar(out, ".summary.csv");
    let meta = sidecar(out, ".meta.txt");
    write_summary(&result.aggregates, cfg, &summary)?;
    write_meta(cfg, &meta)?;
    Ok((summary, meta))
}
