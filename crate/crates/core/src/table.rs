use std::io::Read;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Header plus all-numeric rows of a CSV; every row must match the header width.
pub(crate) fn read_numeric<R: Read, T: Scalar>(reader: R) -> Result<(Vec<String>, Vec<Vec<T>>)> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| Error::Parse { line, message: format!("`{f}` is not a number") })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub(crate) fn expect_header(found: &[String], expected: &[&str]) -> Result<()> {
    if found.len() != expected.len() || found.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}, found {}", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}
