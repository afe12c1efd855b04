//! CSV serialization of trajectories, codifference series, and study
//! summaries.
//!
//! Floating-point fields are written with `{:.16e}`, which round-trips f64
//! exactly, so rereading a file reproduces the values bit for bit.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use crate::error::{Error, Result};
use crate::theory::CodiffSeries;
use crate::var::BiTrajectory;

fn csv_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| csv_err(path, line, format!("bad float {field:?}: {e}")))
}

/// Writes a trajectory as `x1,x2` rows.
pub fn write_trajectory(path: &Path, traj: &BiTrajectory) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "x1,x2")?;
    for (a, b) in traj.x1().iter().zip(traj.x2()) {
        writeln!(w, "{a:.16e},{b:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<BiTrajectory> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x1,x2" => {}
        Some((_, header)) => {
            return Err(csv_err(path, 1, format!("expected header x1,x2, got {header:?}")))
        }
        None => return Err(csv_err(path, 1, "empty file")),
    }
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(csv_err(path, line_no, "expected exactly two fields")),
        };
        x1.push(parse_f64(path, line_no, a)?);
        x2.push(parse_f64(path, line_no, b)?);
    }
    BiTrajectory::new(x1, x2)
}

/// Writes a codifference series as `h,cd` rows in increasing lag order.
pub fn write_codiff_series(path: &Path, series: &CodiffSeries) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "h,cd")?;
    for (h, v) in series.iter() {
        writeln!(w, "{h},{v:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_codiff_series(path: &Path) -> Result<CodiffSeries> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "h,cd" => {}
        Some((_, header)) => {
            return Err(csv_err(path, 1, format!("expected header h,cd, got {header:?}")))
        }
        None => return Err(csv_err(path, 1, "empty file")),
    }
    let mut lags = Vec::new();
    let mut values = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.split(',');
        let (h, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(h), Some(v), None) => (h, v),
            _ => return Err(csv_err(path, line_no, "expected exactly two fields")),
        };
        let h: i64 = h
            .trim()
            .parse()
            .map_err(|e| csv_err(path, line_no, format!("bad lag {h:?}: {e}")))?;
        lags.push(h);
        values.push(parse_f64(path, line_no, v)?);
    }
    if lags.is_empty() {
        return Err(csv_err(path, 2, "no data rows"));
    }
    for (i, w) in lags.windows(2).enumerate() {
        if w[1] != w[0] + 1 {
            return Err(csv_err(
                path,
                i + 3,
                format!("lags must be consecutive, got {} after {}", w[1], w[0]),
            ));
        }
    }
    CodiffSeries::new(lags[0], values)
}

/// One row of a study summary: the median of `estimator` over all
/// replications at sample length `n`, plus how many replications failed and
/// were excluded from that median.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub estimator: String,
    pub median: f64,
    pub failures: usize,
}

/// Writes summary rows as `n,estimator,median,failures`.
pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "n,estimator,median,failures")?;
    for r in rows {
        writeln!(w, "{},{},{:.16e},{}", r.n, r.estimator, r.median, r.failures)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "n,estimator,median,failures" => {}
        Some((_, header)) => {
            return Err(csv_err(
                path,
                1,
                format!("expected header n,estimator,median,failures, got {header:?}"),
            ))
        }
        None => return Err(csv_err(path, 1, "empty file")),
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 4 {
            return Err(csv_err(path, line_no, "expected exactly four fields"));
        }
        let n = fields[0]
            .trim()
            .parse()
            .map_err(|e| csv_err(path, line_no, format!("bad length {:?}: {e}", fields[0])))?;
        let failures = fields[3]
            .trim()
            .parse()
            .map_err(|e| csv_err(path, line_no, format!("bad count {:?}: {e}", fields[3])))?;
        rows.push(SummaryRow {
            n,
            estimator: fields[1].trim().to_string(),
            median: parse_f64(path, line_no, fields[2])?,
            failures,
        });
    }
    Ok(rows)
}
