//! Numeric CSV tables: one row per point, header optional.

use std::io::Write;
use std::path::Path;

use crate::exit::{CliError, CliResult};
use crate::inputs::require_file;

/// Rows of a numeric CSV. A first row that does not parse as numbers is
/// taken as a header.
pub fn read(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    require_file(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;

    let mut rows = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(CliError::malformed(format!(
                    "{}: line {}: {e}",
                    path.display(),
                    i + 1
                )))
            }
        };
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(CliError::malformed(format!(
                "{}: line {}: column {} is not finite",
                path.display(),
                i + 1,
                bad + 1
            )));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CliError::malformed(format!(
                    "{}: line {} has {} columns, expected {w}",
                    path.display(),
                    i + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::malformed(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// Splits rows into sites and the trailing value column.
pub fn read_samples(path: &Path) -> CliResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let rows = read(path)?;
    if rows[0].len() < 2 {
        return Err(CliError::malformed(format!(
            "{}: need at least one coordinate column and a value column",
            path.display()
        )));
    }
    Ok(rows
        .into_iter()
        .map(|mut r| {
            let y = r.pop().expect("row has at least two columns");
            (r, y)
        })
        .unzip())
}

/// Writes `x1..xd,value` rows.
pub fn write_predictions<W: Write>(out: W, points: &[Vec<f64>], values: &[f64]) -> CliResult<()> {
    let dim = points.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::new(crate::exit::code::IO, format!("writing predictions: {e}"));
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(io_err)?;
    for (p, v) in points.iter().zip(values) {
        let mut rec: Vec<String> = p.iter().map(|c| format!("{c:e}")).collect();
        rec.push(format!("{v:e}"));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| CliError::new(crate::exit::code::IO, format!("writing predictions: {e}")))
}
