use std::io::{Read, Write};

use chrono::NaiveDate;
use log::warn;

use super::{RatePanel, RateSeries, ReturnPanel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Layout of a single-currency rate file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub date_column: String,
    pub rate_column: String,
    /// `chrono` format string for the date column.
    pub date_format: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',', date_column: "date".into(), rate_column: "rate".into(), date_format: "%Y-%m-%d".into() }
    }
}

/// Parse one currency's daily reference rates.
///
/// Rows are returned sorted by date. Unusable rates become `None` and produce
/// a warning; a row whose date cannot be parsed is a hard error.
pub fn parse_rate_csv<R: Read, T: Scalar>(
    source: R,
    currency_code: &str,
    options: &CsvOptions,
) -> Result<RateSeries<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput(format!("rate file for `{currency_code}` is empty")));
    }
    let find = |name: &str| {
        headers.iter().position(|h| h.trim_matches('"').eq_ignore_ascii_case(name)).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("header lacks column `{name}` (found: {})", headers.iter().collect::<Vec<_>>().join(",")),
        })
    };
    let date_idx = find(&options.date_column)?;
    let rate_idx = find(&options.rate_column)?;

    let mut rows: Vec<(NaiveDate, Option<T>)> = Vec::new();
    let mut warnings = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let date_field =
            record.get(date_idx).ok_or_else(|| Error::Parse { line, message: "row has no date field".into() })?;
        let date = NaiveDate::parse_from_str(date_field, &options.date_format)
            .map_err(|e| Error::Parse { line, message: format!("bad date `{date_field}`: {e}") })?;
        let raw = record.get(rate_idx).unwrap_or("");
        let rate = raw.parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0).and_then(T::from_f64);
        if rate.is_none() {
            let msg = format!("{currency_code} line {line}: rate `{raw}` unusable, marked missing");
            warn!("{msg}");
            warnings.push(msg);
        }
        rows.push((date, rate));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!("rate file for `{currency_code}` has no data rows")));
    }

    rows.sort_by_key(|(d, _)| *d);
    let mut dates = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for (date, value) in rows {
        if dates.last() == Some(&date) {
            let msg = format!("{currency_code}: duplicate date {date}, keeping first occurrence");
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        dates.push(date);
        values.push(value);
    }
    Ok(RateSeries { code: currency_code.to_string(), dates, values, warnings })
}

fn write_columnar<W: Write, T: Scalar>(
    writer: W,
    dates: &[NaiveDate],
    codes: &[String],
    columns: &[Vec<T>],
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["date".to_string()];
    header.extend(codes.iter().cloned());
    out.write_record(&header)?;
    for (row, date) in dates.iter().enumerate() {
        let mut record = vec![date.format("%Y-%m-%d").to_string()];
        record.extend(columns.iter().map(|c| c[row].to_string()));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

type Columnar<T> = (Vec<NaiveDate>, Vec<String>, Vec<Vec<T>>);

fn read_columnar<R: Read, T: Scalar>(reader: R) -> Result<Columnar<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || !headers[0].eq_ignore_ascii_case("date") {
        return Err(Error::Parse { line: 1, message: "expected header `date,<code>,...`".into() });
    }
    let codes: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); codes.len()];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| Error::Parse { line, message: format!("bad date `{}`: {e}", &record[0]) })?;
        dates.push(date);
        for (col, field) in columns.iter_mut().zip(record.iter().skip(1)) {
            let v = field
                .parse::<f64>()
                .ok()
                .and_then(T::from_f64)
                .ok_or_else(|| Error::Parse { line, message: format!("bad number `{field}`") })?;
            col.push(v);
        }
    }
    Ok((dates, codes, columns))
}

/// Write a panel as `date,<code>,<code>,...`.
pub fn write_rate_panel_csv<W: Write, T: Scalar>(panel: &RatePanel<T>, writer: W) -> Result<()> {
    write_columnar(writer, panel.dates(), panel.currencies(), panel.columns())
}

pub fn read_rate_panel_csv<R: Read, T: Scalar>(reader: R) -> Result<RatePanel<T>> {
    let (dates, codes, columns) = read_columnar(reader)?;
    RatePanel::new(dates, codes, columns)
}

pub fn write_return_panel_csv<W: Write, T: Scalar>(panel: &ReturnPanel<T>, writer: W) -> Result<()> {
    write_columnar(writer, panel.dates(), panel.currencies(), panel.columns())
}

/// The standardisation flag is not stored in the file; the caller supplies it.
pub fn read_return_panel_csv<R: Read, T: Scalar>(reader: R, standardized: bool) -> Result<ReturnPanel<T>> {
    let (dates, codes, columns) = read_columnar(reader)?;
    ReturnPanel::new(dates, codes, columns, standardized)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RateSeries<f64>> {
        parse_rate_csv(text.as_bytes(), "USD", &CsvOptions::default())
    }

    #[test]
    fn reads_two_rows_back() {
        let s = parse("date,rate\n2000-01-13,1.02\n2000-01-14,1.03\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.values, vec![Some(1.02), Some(1.03)]);
        assert_eq!(s.dates[0], NaiveDate::from_ymd_opt(2000, 1, 13).unwrap());
    }

    #[test]
    fn negative_rate_is_flagged_missing() {
        let s = parse("date,rate\n2000-01-13,-1.0\n2000-01-14,1.03\n").unwrap();
        assert_eq!(s.values[0], None);
        assert_eq!(s.missing_count(), 1);
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn non_numeric_and_blank_rates_are_missing() {
        let s = parse("date,rate\n2000-01-13,NaN\n2000-01-14,\n2000-01-17,1.1\n").unwrap();
        assert_eq!(s.values, vec![None, None, Some(1.1)]);
    }

    #[test]
    fn shuffled_dates_come_back_sorted() {
        let s = parse("date,rate\n2000-01-14,2\n2000-01-12,1\n2000-01-13,3\n").unwrap();
        assert!(s.dates.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.values, vec![Some(1.0), Some(3.0), Some(2.0)]);
    }

    #[test]
    fn missing_header_column_names_line_one() {
        match parse("day,value\n2000-01-13,1.0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_date_names_its_line() {
        match parse("date,rate\n2000-01-13,1.0\nnot-a-date,1.0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_input() {
        assert!(matches!(parse(""), Err(Error::EmptyInput(_))));
        assert!(matches!(parse("date,rate\n"), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn custom_layout() {
        let opts = CsvOptions {
            delimiter: b';',
            date_column: "TIME_PERIOD".into(),
            rate_column: "OBS_VALUE".into(),
            date_format: "%d/%m/%Y".into(),
        };
        let s: RateSeries<f64> =
            parse_rate_csv("KEY;TIME_PERIOD;OBS_VALUE\nx;13/01/2000;1.5\n".as_bytes(), "GBP", &opts).unwrap();
        assert_eq!(s.values, vec![Some(1.5)]);
    }

    #[test]
    fn duplicate_dates_keep_first() {
        let s = parse("date,rate\n2000-01-13,1.0\n2000-01-13,2.0\n").unwrap();
        assert_eq!(s.values, vec![Some(1.0)]);
        assert_eq!(s.warnings.len(), 1);
    }
}
