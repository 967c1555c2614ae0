//! CSV artifacts: exclusion curves and readout data.

use std::io::{Read, Write};
use std::path::Path;

use nvforce::{ExclusionPoint, ReadoutPoint};

use crate::error::CliError;

pub const CURVE_HEADER: &str = "lambda_m,alp_mass_ev,g_bound";
pub const READOUT_HEADER: &str = "phi_mw_rad,mean_counts,std_error";

/// Curve rows sorted by λ, non-finite bounds dropped. Returns the number of
/// rows omitted.
pub fn write_curve<W: Write>(mut w: W, points: &[ExclusionPoint]) -> std::io::Result<usize> {
    let mut rows: Vec<&ExclusionPoint> = points.iter().collect();
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut dropped = 0;
    writeln!(w, "{CURVE_HEADER}")?;
    for p in rows {
        if !(p.lambda.is_finite() && p.alp_mass_ev.is_finite() && p.g_bound.is_finite()) {
            dropped += 1;
            continue;
        }
        writeln!(w, "{:.9e},{:.9e},{:.9e}", p.lambda, p.alp_mass_ev, p.g_bound)?;
    }
    w.flush()?;
    Ok(dropped)
}

pub fn write_readout<W: Write>(mut w: W, points: &[ReadoutPoint]) -> std::io::Result<()> {
    writeln!(w, "{READOUT_HEADER}")?;
    for p in points {
        writeln!(w, "{:.15e},{:.15e},{:.15e}", p.phi_mw, p.mean_counts, p.std_error)?;
    }
    w.flush()
}

/// Parse readout data; `path` only labels error messages.
pub fn read_readout<R: Read>(reader: R, path: &Path) -> Result<Vec<ReadoutPoint>, CliError> {
    let data_err = |line: u64, message: String| CliError::Data {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| data_err(1, e.to_string()))?.clone();
    let expected: Vec<&str> = READOUT_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(data_err(1, format!("expected header `{READOUT_HEADER}`")));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            data_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 3];
        for (i, (field, name)) in rec.iter().zip(&expected).enumerate() {
            vals[i] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(line, format!("{name}: `{field}` is not a finite number")))?;
        }
        if vals[2] < 0.0 {
            return Err(data_err(line, "std_error must be >= 0".into()));
        }
        points.push(ReadoutPoint {
            phi_mw: vals[0],
            mean_counts: vals[1],
            std_error: vals[2],
        });
    }
    if points.is_empty() {
        return Err(data_err(1, "no data rows".into()));
    }
    Ok(points)
}
