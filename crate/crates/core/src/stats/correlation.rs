use super::SymmetricMatrix;
use crate::error::{Error, Result};
use crate::ingest::ReturnPanel;
use crate::scalar::Scalar;

fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::of_usize(xs.len())
}

/// Pearson correlation of two equal-length slices; `None` if either is constant.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    debug_assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    let r = sxy / (sxx * syy).sqrt();
    Some(r.max(-T::one()).min(T::one()))
}

fn sample_covariance<T: Scalar>(x: &[T], y: &[T]) -> T {
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum::<T>() / T::of_usize(x.len() - 1)
}

fn require_rows<T: Scalar>(panel: &ReturnPanel<T>, min: usize) -> Result<()> {
    if panel.n_rows() < min {
        return Err(Error::InsufficientData(format!("need at least {min} rows, have {}", panel.n_rows())));
    }
    Ok(())
}

fn check_not_constant<T: Scalar>(panel: &ReturnPanel<T>) -> Result<()> {
    for (code, col) in panel.currencies().iter().zip(panel.columns()) {
        if col.iter().all(|v| *v == col[0]) {
            return Err(Error::UndefinedCorrelation(code.clone()));
        }
    }
    Ok(())
}

/// Sample covariance (n-1). Requires standardised input so the diagonal is one.
pub fn covariance_matrix<T: Scalar>(panel: &ReturnPanel<T>) -> Result<SymmetricMatrix<T>> {
    if !panel.is_standardized() {
        return Err(Error::Parameter("covariance matrix expects a standardised panel".into()));
    }
    require_rows(panel, 3)?;
    let cols = panel.columns();
    Ok(SymmetricMatrix::from_fn(panel.currencies().to_vec(), |i, j| sample_covariance(&cols[i], &cols[j])))
}

pub fn pearson_matrix<T: Scalar>(panel: &ReturnPanel<T>) -> Result<SymmetricMatrix<T>> {
    require_rows(panel, 3)?;
    check_not_constant(panel)?;
    let cols = panel.columns();
    Ok(SymmetricMatrix::from_fn(panel.currencies().to_vec(), |i, j| {
        if i == j {
            T::one()
        } else {
            pearson(&cols[i], &cols[j]).expect("columns checked non-constant")
        }
    }))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp_finite(&xs[b]));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = T::of((start + 1 + end) as f64 / 2.0);
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

pub fn spearman_matrix<T: Scalar>(panel: &ReturnPanel<T>) -> Result<SymmetricMatrix<T>> {
    require_rows(panel, 3)?;
    check_not_constant(panel)?;
    let ranks: Vec<Vec<T>> = panel.columns().iter().map(|c| average_ranks(c)).collect();
    Ok(SymmetricMatrix::from_fn(panel.currencies().to_vec(), |i, j| {
        if i == j {
            T::one()
        } else {
            pearson(&ranks[i], &ranks[j]).expect("ranks of non-constant column vary")
        }
    }))
}

/// Correlation of `x_t` with `y_{t+lag}` over the overlapping stretch.
pub fn lagged_correlation<T: Scalar>(x: &[T], y: &[T], lag: isize) -> Option<T> {
    let n = x.len();
    let l = lag.unsigned_abs();
    if l + 2 > n {
        return None;
    }
    if lag >= 0 {
        pearson(&x[..n - l], &y[l..])
    } else {
        pearson(&x[l..], &y[..n - l])
    }
}

/// Signed correlation at the lag of maximal |rho| within `[-max_lag, max_lag]`.
///
/// Lags are visited as 0, -1, +1, -2, +2, ... and only a strictly larger |rho|
/// replaces the incumbent, so ties favour the shortest lag.
pub fn cross_correlation_matrix<T: Scalar>(panel: &ReturnPanel<T>, max_lag: usize) -> Result<SymmetricMatrix<T>> {
    if panel.n_rows() <= max_lag + 2 {
        return Err(Error::InsufficientData(format!("{} rows cannot support max_lag {max_lag}", panel.n_rows())));
    }
    check_not_constant(panel)?;
    let cols = panel.columns();
    let lags: Vec<isize> = std::iter::once(0).chain((1..=max_lag as isize).flat_map(|l| [-l, l])).collect();
    Ok(SymmetricMatrix::from_fn(panel.currencies().to_vec(), |i, j| {
        if i == j {
            return T::one();
        }
        let mut best: Option<T> = None;
        for &lag in &lags {
            if let Some(r) = lagged_correlation(&cols[i], &cols[j], lag) {
                if best.is_none_or(|b| r.abs() > b.abs()) {
                    best = Some(r);
                }
            }
        }
        best.unwrap_or(T::zero())
    }))
}

/// Sample variance (n-1) per currency.
pub fn variance_summary<T: Scalar>(panel: &ReturnPanel<T>) -> Result<Vec<(String, T)>> {
    require_rows(panel, 2)?;
    Ok(panel
        .currencies()
        .iter()
        .zip(panel.columns())
        .map(|(code, col)| (code.clone(), sample_covariance(col, col)))
        .collect())
}
