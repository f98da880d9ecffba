//! Serialization of Monte Carlo reports.
//!
//! The CSV has one row per (kind, N, α), mirroring the layout of a size or
//! power table; the statistic summary of each (kind, N) is repeated on its
//! α rows. The JSON form is the full [`MCReport`].

use super::harness::MCReport;
use crate::error::Result;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct CsvRow<'a> {
    mode: &'a str,
    kind: String,
    n: usize,
    alpha: f64,
    rejections: usize,
    valid: usize,
    rate: f64,
    mean_statistic: f64,
    cv: f64,
    q95: f64,
    failures: usize,
}

pub fn report_csv(report: &MCReport) -> Result<String> {
    let mode = match report.mode {
        super::ExperimentMode::Size => "size",
        super::ExperimentMode::Power => "power",
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for cell in &report.rates {
        let stat = report
            .statistic(cell.kind, cell.n)
            .expect("every rate cell has a statistic cell");
        let failures = report.failures.iter().find(|f| f.n == cell.n).map_or(0, |f| f.failures);
        w.serialize(CsvRow {
            mode,
            kind: cell.kind.to_string(),
            n: cell.n,
            alpha: cell.alpha,
            rejections: cell.rejections,
            valid: cell.valid,
            rate: cell.rate,
            mean_statistic: stat.mean,
            cv: stat.cv,
            q95: stat.q95,
            failures,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn report_json(report: &MCReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes `report.csv` and `report.json` into `dir`, returning both paths.
pub fn write_report(report: &MCReport, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("report.csv");
    let json_path = dir.join("report.json");
    fs::write(&csv_path, report_csv(report)?)?;
    fs::write(&json_path, report_json(report)?)?;
    Ok((csv_path, json_path))
}
