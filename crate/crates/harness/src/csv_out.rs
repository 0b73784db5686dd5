//! Learning-curve CSV: one row per window per trial.

use crate::error::{HarnessError, Result};
use crate::sweep::NoiseCell;
use crate::trial::TrialMetrics;

pub const HEADER: [&str; 7] = [
    "algo",
    "dataset",
    "param",
    "trial",
    "round",
    "window_ratio",
    "cum_ratio",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algo: String,
    pub dataset: String,
    pub param: String,
    pub trial: usize,
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algo: String,
    pub dataset: String,
    pub param: String,
    pub trial: usize,
    pub round: usize,
    pub window_ratio: f64,
    pub cum_ratio: f64,
}

/// Plain decimal with `digits` significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn emit_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in records {
        for p in r.metrics.points() {
            w.write_record([
                r.algo.clone(),
                r.dataset.clone(),
                r.param.clone(),
                r.trial.to_string(),
                p.round.to_string(),
                fmt_sig(p.window_ratio, 6),
                fmt_sig(p.cum_ratio, 6),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(HarnessError::CsvField {
            row: 0,
            msg: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<f64> {
            field(j).parse().map_err(|_| HarnessError::CsvField {
                row,
                msg: format!("bad {} {:?}", HEADER[j], field(j)),
            })
        };
        let int = |j: usize| -> Result<usize> {
            field(j).parse().map_err(|_| HarnessError::CsvField {
                row,
                msg: format!("bad {} {:?}", HEADER[j], field(j)),
            })
        };
        rows.push(CsvRow {
            algo: field(0).to_string(),
            dataset: field(1).to_string(),
            param: field(2).to_string(),
            trial: int(3)?,
            round: int(4)?,
            window_ratio: num(5)?,
            cum_ratio: num(6)?,
        });
    }
    Ok(rows)
}

/// `sigma,beta,mean,stddev,guaranteed`, one row per cell.
pub fn emit_noise_csv(cells: &[NoiseCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sigma", "beta", "mean", "stddev", "guaranteed"])?;
    for c in cells {
        w.write_record([
            c.sigma.to_string(),
            fmt_sig(c.beta, 6),
            fmt_sig(c.mean, 6),
            fmt_sig(c.stddev, 6),
            c.guaranteed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
