//! Sample data interchange: CSV with one observation per row.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::SampleSet;

/// Parses one observation per row, `p` numeric columns. A first row with
/// any non-numeric field is taken as a header and skipped.
pub fn read_samples_from<R: Read>(input: R) -> Result<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(Error::Data(format!(
                            "line {}: expected {} columns, found {}",
                            i + 1,
                            first.len(),
                            row.len()
                        )));
                    }
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Data(format!("line {}: non-finite value", i + 1)));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Data(format!("line {}: {e}", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Data("no observations found".into()));
    }
    SampleSet::from_rows(rows)
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    read_samples_from(std::fs::File::open(path)?)
}

/// Writes one observation per row without a header.
pub fn write_samples<W: std::io::Write>(samples: &SampleSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in samples.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
