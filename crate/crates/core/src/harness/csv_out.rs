use std::io::Write;

use serde::Serialize;

use super::experiment::{CoverageReport, ErrorCurveReport, VisitReport};
use crate::error::{Error, Result};

/// Flat CSV view of a replicate; per-skip minimum visit counts are joined
/// with `;`.
#[derive(Serialize)]
struct CoverageRow<'a> {
    replicate: usize,
    kappa_true: f64,
    kappa_hat: f64,
    #[serde(rename = "S")]
    scan_bound: usize,
    ci_lower: f64,
    ci_upper: f64,
    ci_width: f64,
    degenerate: bool,
    covered: bool,
    t_hat: Option<f64>,
    t_hat_int: Option<u64>,
    tmix: u64,
    bracket_hit: bool,
    abs_error: f64,
    n_min_per_s: &'a str,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv output failed: {e}"))
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()
        .map_err(|e| Error::Parse(format!("csv output failed: {e}")))
}

pub fn write_coverage_csv<W: Write>(report: &CoverageReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.records {
        let n_mins = r
            .n_min_per_s
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        w.serialize(CoverageRow {
            replicate: r.replicate,
            kappa_true: report.truth.kappa_gen,
            kappa_hat: r.kappa_hat,
            scan_bound: r.scan_bound,
            ci_lower: r.ci_lower,
            ci_upper: r.ci_upper,
            ci_width: r.ci_width,
            degenerate: r.degenerate,
            covered: r.covered,
            t_hat: r.t_hat,
            t_hat_int: r.t_hat_int,
            tmix: report.truth.tmix,
            bracket_hit: r.bracket_hit,
            abs_error: r.abs_error,
            n_min_per_s: &n_mins,
        })
        .map_err(csv_error)?;
    }
    finish(w)
}

pub fn write_error_curve_csv<W: Write>(report: &ErrorCurveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row).map_err(csv_error)?;
    }
    finish(w)
}

pub fn write_visits_csv<W: Write>(report: &VisitReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row).map_err(csv_error)?;
    }
    finish(w)
}
