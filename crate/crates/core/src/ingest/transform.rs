use std::collections::BTreeSet;

use chrono::{Datelike, NaiveDate};

use super::{RatePanel, RateSeries, ReturnPanel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How daily observations inside a calendar month collapse to one value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonthlyRule {
    /// Last available observation of the month.
    #[default]
    Last,
    Mean,
}

/// Align single-currency series on a common date axis.
///
/// The axis spans from the latest first valid observation to the earliest
/// last valid observation and contains every date seen in any input within
/// that span. Interior gaps are filled by linear interpolation of the rate
/// level in calendar time.
pub fn merge_and_interpolate<T: Scalar>(series: &[RateSeries<T>]) -> Result<RatePanel<T>> {
    if series.is_empty() {
        return Err(Error::EmptyInput("no series to merge".into()));
    }
    let mut start = NaiveDate::MIN;
    let mut end = NaiveDate::MAX;
    for s in series {
        let mut valid = s.valid();
        let first = valid.next().ok_or_else(|| Error::EmptyInput(format!("`{}` has no usable rates", s.code)))?;
        let last = s.valid().last().unwrap_or(first);
        start = start.max(first.0);
        end = end.min(last.0);
    }
    if start > end {
        return Err(Error::DisjointRange(series.len()));
    }

    let axis: Vec<NaiveDate> = series
        .iter()
        .flat_map(|s| s.dates.iter().copied())
        .filter(|d| *d >= start && *d <= end)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let columns = series
        .iter()
        .map(|s| {
            let known: Vec<(NaiveDate, T)> = s.valid().collect();
            interpolate_onto(&known, &axis)
        })
        .collect();
    let codes = series.iter().map(|s| s.code.clone()).collect();
    RatePanel::new(axis, codes, columns)
}

/// `known` is sorted and brackets every date of `axis`.
fn interpolate_onto<T: Scalar>(known: &[(NaiveDate, T)], axis: &[NaiveDate]) -> Vec<T> {
    let mut out = Vec::with_capacity(axis.len());
    let mut hi = 0;
    for &date in axis {
        while known[hi].0 < date {
            hi += 1;
        }
        if known[hi].0 == date {
            out.push(known[hi].1);
            continue;
        }
        let (d0, v0) = known[hi - 1];
        let (d1, v1) = known[hi];
        let span = T::of((d1 - d0).num_days() as f64);
        let offset = T::of((date - d0).num_days() as f64);
        out.push(v0 + (v1 - v0) * offset / span);
    }
    out
}

fn last_day_of_month(year: i32, month: u32) -> NaiveDate {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    NaiveDate::from_ymd_opt(ny, nm, 1).and_then(|d| d.pred_opt()).expect("valid calendar month")
}

/// One row per calendar month, dated at month end.
pub fn resample_monthly<T: Scalar>(panel: &RatePanel<T>, rule: MonthlyRule) -> Result<RatePanel<T>> {
    let dates = panel.dates();
    let Some((first, last)) = dates.first().zip(dates.last()) else {
        return Err(Error::InsufficientData("empty panel".into()));
    };
    let month_index = |d: &NaiveDate| d.year() * 12 + d.month0() as i32;
    let (m0, m1) = (month_index(first), month_index(last));
    if m1 == m0 {
        return Err(Error::InsufficientData("panel covers fewer than 2 calendar months".into()));
    }

    let n_months = (m1 - m0 + 1) as usize;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_months];
    for (row, d) in dates.iter().enumerate() {
        groups[(month_index(d) - m0) as usize].push(row);
    }
    let mut month_dates = Vec::with_capacity(n_months);
    for (offset, rows) in groups.iter().enumerate() {
        let m = m0 + offset as i32;
        let (year, month) = (m.div_euclid(12), m.rem_euclid(12) as u32 + 1);
        if rows.is_empty() {
            return Err(Error::Domain(format!("no observations in {year}-{month:02}")));
        }
        month_dates.push(last_day_of_month(year, month));
    }

    let columns = panel
        .columns()
        .iter()
        .map(|col| {
            groups
                .iter()
                .map(|rows| match rule {
                    MonthlyRule::Last => col[*rows.last().expect("non-empty month")],
                    MonthlyRule::Mean => rows.iter().map(|&r| col[r]).sum::<T>() / T::of_usize(rows.len()),
                })
                .collect()
        })
        .collect();
    RatePanel::new(month_dates, panel.currencies().to_vec(), columns)
}

/// `r_t = ln(P_t) - ln(P_{t-1})`; the first date is consumed.
pub fn log_returns<T: Scalar>(panel: &RatePanel<T>) -> Result<ReturnPanel<T>> {
    if panel.n_rows() < 2 {
        return Err(Error::InsufficientData("log-returns need at least 2 rows".into()));
    }
    let mut columns = Vec::with_capacity(panel.columns().len());
    for (code, col) in panel.currencies().iter().zip(panel.columns()) {
        if col.iter().any(|v| *v <= T::zero()) {
            return Err(Error::Domain(format!("non-positive rate in `{code}`")));
        }
        columns.push(col.windows(2).map(|w| w[1].ln() - w[0].ln()).collect());
    }
    ReturnPanel::new(panel.dates()[1..].to_vec(), panel.currencies().to_vec(), columns, false)
}

pub(crate) fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::of_usize(xs.len())
}

/// Sample variance with the n-1 denominator.
pub(crate) fn sample_variance<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::of_usize(xs.len() - 1)
}

/// Per-column z-scores with the sample (n-1) standard deviation.
pub fn standardize<T: Scalar>(panel: &ReturnPanel<T>) -> Result<ReturnPanel<T>> {
    if panel.n_rows() < 2 {
        return Err(Error::InsufficientData("standardisation needs at least 2 rows".into()));
    }
    let mut columns = Vec::with_capacity(panel.n_cols());
    for (code, col) in panel.currencies().iter().zip(panel.columns()) {
        let m = mean(col);
        let sd = sample_variance(col).sqrt();
        let scale = col.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
        if !(sd > T::epsilon() * scale) {
            return Err(Error::DegenerateColumn(code.clone()));
        }
        columns.push(col.iter().map(|&x| (x - m) / sd).collect());
    }
    ReturnPanel::new(panel.dates().to_vec(), panel.currencies().to_vec(), columns, true)
}
