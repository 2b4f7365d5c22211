//! Reference-rate ingestion: CSV parsing, alignment, monthly resampling and
//! the log-return transform feeding both feature branches.

mod csv_io;
mod transform;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use csv_io::{
    parse_rate_csv, read_rate_panel_csv, read_return_panel_csv, write_rate_panel_csv, write_return_panel_csv,
    CsvOptions,
};
pub use transform::{log_returns, merge_and_interpolate, resample_monthly, standardize, MonthlyRule};

/// Raw observations for one currency as read from disk.
///
/// Entries whose rate could not be used (unparseable, non-positive, non-finite)
/// are kept as `None` so that gaps stay visible to the merge step.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries<T> {
    pub code: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> RateSeries<T> {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Observations that carry a usable rate.
    pub fn valid(&self) -> impl Iterator<Item = (NaiveDate, T)> + '_ {
        self.dates.iter().zip(&self.values).filter_map(|(d, v)| v.map(|v| (*d, v)))
    }
}

/// Dated matrix of strictly positive reference rates, one column per currency.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePanel<T> {
    dates: Vec<NaiveDate>,
    currencies: Vec<String>,
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> RatePanel<T> {
    pub fn new(dates: Vec<NaiveDate>, currencies: Vec<String>, columns: Vec<Vec<T>>) -> Result<Self> {
        check_shape(&dates, &currencies, &columns)?;
        for (code, col) in currencies.iter().zip(&columns) {
            if let Some(bad) = col.iter().find(|v| !v.is_finite() || **v <= T::zero()) {
                return Err(Error::Domain(format!("rate {bad} in column `{code}` is not strictly positive")));
            }
        }
        Ok(Self { dates, currencies, columns })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn currencies(&self) -> &[String] {
        &self.currencies
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn column(&self, code: &str) -> Option<&[T]> {
        let idx = self.currencies.iter().position(|c| c == code)?;
        Some(&self.columns[idx])
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    /// Keep only rows with `start <= date <= end`.
    pub fn restrict_dates(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Result<Self> {
        let keep: Vec<usize> = (0..self.dates.len())
            .filter(|&i| start.is_none_or(|s| self.dates[i] >= s) && end.is_none_or(|e| self.dates[i] <= e))
            .collect();
        if keep.is_empty() {
            return Err(Error::EmptyInput("date range selects no rows".into()));
        }
        let dates = keep.iter().map(|&i| self.dates[i]).collect();
        let columns = self.columns.iter().map(|col| keep.iter().map(|&i| col[i]).collect()).collect();
        Ok(Self { dates, currencies: self.currencies.clone(), columns })
    }

    /// Drop the listed currencies (e.g. the numeraire).
    pub fn without(&self, excluded: &[String]) -> Self {
        let mut currencies = Vec::new();
        let mut columns = Vec::new();
        for (code, col) in self.currencies.iter().zip(&self.columns) {
            if !excluded.iter().any(|e| e.eq_ignore_ascii_case(code)) {
                currencies.push(code.clone());
                columns.push(col.clone());
            }
        }
        Self { dates: self.dates.clone(), currencies, columns }
    }
}

/// Log-return matrix; `standardized` records whether columns are z-scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel<T> {
    dates: Vec<NaiveDate>,
    currencies: Vec<String>,
    columns: Vec<Vec<T>>,
    standardized: bool,
}

impl<T: Scalar> ReturnPanel<T> {
    pub fn new(
        dates: Vec<NaiveDate>,
        currencies: Vec<String>,
        columns: Vec<Vec<T>>,
        standardized: bool,
    ) -> Result<Self> {
        check_shape(&dates, &currencies, &columns)?;
        for (code, col) in currencies.iter().zip(&columns) {
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("non-finite return in column `{code}`")));
            }
        }
        Ok(Self { dates, currencies, columns, standardized })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn currencies(&self) -> &[String] {
        &self.currencies
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn column(&self, code: &str) -> Option<&[T]> {
        let idx = self.currencies.iter().position(|c| c == code)?;
        Some(&self.columns[idx])
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    pub fn n_cols(&self) -> usize {
        self.currencies.len()
    }
}

fn check_shape<T>(dates: &[NaiveDate], currencies: &[String], columns: &[Vec<T>]) -> Result<()> {
    if currencies.len() != columns.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} currency codes for {} columns",
            currencies.len(),
            columns.len()
        )));
    }
    if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("dates not strictly increasing at {}", w[1])));
    }
    for (code, col) in currencies.iter().zip(columns) {
        if col.len() != dates.len() {
            return Err(Error::DimensionMismatch(format!(
                "column `{code}` has {} rows, expected {}",
                col.len(),
                dates.len()
            )));
        }
    }
    Ok(())
}
