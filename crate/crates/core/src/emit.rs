//! Plot-ready delimited tables and a JSON summary.
//!
//! All tables use `,` as separator and `.` as decimal point, with a header
//! row naming the columns. Floats are written in shortest round-trip form,
//! so the bytes depend only on the artifact.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::RoundRecord;
use crate::run::{RunArtifact, StatsReport};
use crate::state::Diagnostics;
use crate::stats::PowerLawFit;

pub const CONFIG_FILE: &str = "config.txt";
pub const ROUNDS_FILE: &str = "rounds.csv";
pub const RETURNS_FILE: &str = "daily_returns.csv";
pub const ACF_FILE: &str = "acf.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const SEMIVARIOGRAM_FILE: &str = "semivariogram.csv";
pub const GAMMA_FILE: &str = "gamma.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn rounds_table(records: &[RoundRecord]) -> String {
    let mut out = format!("{}\n", RoundRecord::HEADER);
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn returns_table(stats: &StatsReport) -> String {
    let mut out = String::from("day,close,log_return\n");
    for (k, r) in stats.daily_returns.values.iter().enumerate() {
        let _ = writeln!(out, "{},{:?},{:?}", k + 1, stats.daily_closes[k + 1], r);
    }
    out
}

pub fn acf_table(stats: &StatsReport) -> String {
    let mut out = String::from("lag,return_acf,abs_return_acf\n");
    for ((lag, c), r) in stats
        .return_acf
        .lags
        .iter()
        .zip(&stats.return_acf.values)
        .zip(&stats.abs_acf.values)
    {
        let _ = writeln!(out, "{lag},{c:?},{r:?}");
    }
    out
}

pub fn histogram_table(stats: &StatsReport) -> String {
    let h = &stats.histogram;
    let mut out = String::from("bin_left,bin_right,count,density\n");
    for ((edges, count), density) in h.bin_edges.windows(2).zip(&h.counts).zip(h.density()) {
        let _ = writeln!(out, "{:?},{:?},{},{:?}", edges[0], edges[1], count, density);
    }
    out
}

pub fn semivariogram_table(stats: &StatsReport) -> String {
    let mut out = String::from("lag,semivariance\n");
    for (k, v) in stats.variogram.semivariogram.iter().enumerate() {
        let _ = writeln!(out, "{},{:?}", k + 1, v);
    }
    out
}

pub fn gamma_table(stats: &StatsReport) -> String {
    match stats.gamma() {
        Some(fit) => format!("{}\n{}\n", PowerLawFit::HEADER, fit.csv_row()),
        None => format!(
            "{}\n# fit failed: {}\n",
            PowerLawFit::HEADER,
            stats.fit_error.as_deref().unwrap_or("unknown")
        ),
    }
}

pub fn diagnostics_table(d: &Diagnostics) -> String {
    format!(
        "key,value\ndegenerate_price_rounds,{}\nmax_sweep_hits,{}\ntotal_sweeps,{}\nlapsed_orders,{}\ndropped_orders,{}\nfundamental_rounds,{}\n",
        d.degenerate_price_rounds,
        d.max_sweep_hits,
        d.total_sweeps,
        d.lapsed_orders,
        d.dropped_orders,
        d.fundamental_rounds
    )
}

#[derive(Debug, Serialize)]
pub struct StatsSummary<'a> {
    pub observations: usize,
    pub resolution: usize,
    pub mean_return: f64,
    pub return_variance: f64,
    pub excess_kurtosis: Option<f64>,
    pub gamma: Option<&'a PowerLawFit>,
    pub fit_error: Option<&'a str>,
}

impl<'a> StatsSummary<'a> {
    pub fn new(stats: &'a StatsReport) -> Self {
        Self {
            observations: stats.daily_returns.len(),
            resolution: stats.daily_returns.resolution,
            mean_return: stats.return_acf.mean,
            return_variance: stats.return_acf.variance,
            excess_kurtosis: stats.excess_kurtosis(),
            gamma: stats.gamma(),
            fit_error: stats.fit_error.as_deref(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    config: &'a crate::config::ScenarioConfig,
    rounds: usize,
    final_price: f64,
    final_fundamental: f64,
    stats: StatsSummary<'a>,
    diagnostics: &'a Diagnostics,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes the statistics tables shared by simulated and ingested series.
pub fn emit_stats(stats: &StatsReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write(dir, RETURNS_FILE, &returns_table(stats))?,
        write(dir, ACF_FILE, &acf_table(stats))?,
        write(dir, HISTOGRAM_FILE, &histogram_table(stats))?,
        write(dir, SEMIVARIOGRAM_FILE, &semivariogram_table(stats))?,
        write(dir, GAMMA_FILE, &gamma_table(stats))?,
    ])
}

/// Analysis-only output: the statistics tables plus a JSON summary.
pub fn emit_analysis(stats: &StatsReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    let mut files = emit_stats(stats, dir)?;
    files.push(write(
        dir,
        SUMMARY_FILE,
        &to_json(&StatsSummary::new(stats)),
    )?);
    Ok(files)
}

/// Writes every table of a run into `out_dir`, creating it if needed.
pub fn emit(artifact: &RunArtifact, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    let mut files = emit_stats(&artifact.stats, dir)?;
    files.push(write(
        dir,
        CONFIG_FILE,
        &artifact.config.to_config_string(),
    )?);
    files.push(write(dir, ROUNDS_FILE, &rounds_table(&artifact.records))?);
    files.push(write(
        dir,
        DIAGNOSTICS_FILE,
        &diagnostics_table(&artifact.diagnostics),
    )?);
    let last = artifact.records.last();
    let summary = RunSummary {
        config: &artifact.config,
        rounds: artifact.records.len(),
        final_price: *artifact
            .prices
            .last()
            .expect("price history is never empty"),
        final_fundamental: last.map_or(f64::NAN, |r| r.fundamental),
        stats: StatsSummary::new(&artifact.stats),
        diagnostics: &artifact.diagnostics,
    };
    files.push(write(dir, SUMMARY_FILE, &to_json(&summary))?);
    Ok(files)
}
