//! Additive seasonal-trend decomposition by LOESS (Cleveland et al. 1990).
//!
//! Positions inside the LOESS routines are 1-based to keep the window
//! arithmetic identical to the classic formulation.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StlConfig {
    pub seasonal_span: usize,
    /// `None`: next odd integer >= 1.5 * period / (1 - 1.5 / seasonal_span).
    pub trend_span: Option<usize>,
    /// `None`: next odd integer >= period.
    pub low_pass_span: Option<usize>,
    pub seasonal_degree: usize,
    pub trend_degree: usize,
    pub low_pass_degree: usize,
    pub seasonal_jump: usize,
    pub trend_jump: usize,
    pub low_pass_jump: usize,
    pub inner_loops: usize,
    pub outer_loops: usize,
}

impl Default for StlConfig {
    fn default() -> Self {
        Self {
            seasonal_span: 7,
            trend_span: None,
            low_pass_span: None,
            seasonal_degree: 1,
            trend_degree: 1,
            low_pass_degree: 1,
            seasonal_jump: 1,
            trend_jump: 1,
            low_pass_jump: 1,
            inner_loops: 2,
            outer_loops: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StlDecomposition<T> {
    pub trend: Vec<T>,
    pub seasonal: Vec<T>,
    pub residual: Vec<T>,
    pub period: usize,
}

impl<T: Scalar> StlDecomposition<T> {
    /// `trend,seasonal,residual`, one row per observation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["trend", "seasonal", "residual"])?;
        for i in 0..self.trend.len() {
            out.write_record([self.trend[i].to_string(), self.seasonal[i].to_string(), self.residual[i].to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, period: usize) -> Result<Self> {
        let (header, rows) = crate::table::read_numeric::<R, T>(reader)?;
        crate::table::expect_header(&header, &["trend", "seasonal", "residual"])?;
        Ok(Self {
            trend: rows.iter().map(|r| r[0]).collect(),
            seasonal: rows.iter().map(|r| r[1]).collect(),
            residual: rows.iter().map(|r| r[2]).collect(),
            period,
        })
    }
}

fn next_odd(x: f64) -> usize {
    let n = x.ceil().max(3.0) as usize;
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

fn odd_at_least_3(n: usize) -> usize {
    let n = n.max(3);
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

pub fn stl_decompose<T: Scalar>(series: &[T], period: usize, config: &StlConfig) -> Result<StlDecomposition<T>> {
    let n = series.len();
    if period < 2 {
        return Err(Error::Parameter(format!("STL period must be >= 2, got {period}")));
    }
    if n < 2 * period {
        return Err(Error::InsufficientData(format!("STL needs at least {} points, have {n}", 2 * period)));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("STL input contains non-finite values".into()));
    }
    let ns = odd_at_least_3(config.seasonal_span);
    let nt = config
        .trend_span
        .map(odd_at_least_3)
        .unwrap_or_else(|| next_odd(1.5 * period as f64 / (1.0 - 1.5 / ns as f64)));
    let nl = config.low_pass_span.map(odd_at_least_3).unwrap_or_else(|| next_odd(period as f64));
    let params = Params {
        np: period,
        ns,
        nt,
        nl,
        isdeg: config.seasonal_degree.min(1),
        itdeg: config.trend_degree.min(1),
        ildeg: config.low_pass_degree.min(1),
        nsjump: config.seasonal_jump.max(1),
        ntjump: config.trend_jump.max(1),
        nljump: config.low_pass_jump.max(1),
        ni: config.inner_loops.max(1),
    };

    let mut trend = vec![T::zero(); n];
    let mut season = vec![T::zero(); n];
    let mut rw = vec![T::one(); n];
    let mut userw = false;
    let mut pass = 0;
    loop {
        inner_loop(series, &params, userw, &rw, &mut season, &mut trend);
        pass += 1;
        if pass > config.outer_loops {
            break;
        }
        let fit: Vec<T> = trend.iter().zip(&season).map(|(&t, &s)| t + s).collect();
        robustness_weights(series, &fit, &mut rw);
        userw = true;
    }
    let residual = (0..n).map(|i| series[i] - trend[i] - season[i]).collect();
    Ok(StlDecomposition { trend, seasonal: season, residual, period })
}

struct Params {
    np: usize,
    ns: usize,
    nt: usize,
    nl: usize,
    isdeg: usize,
    itdeg: usize,
    ildeg: usize,
    nsjump: usize,
    ntjump: usize,
    nljump: usize,
    ni: usize,
}

fn inner_loop<T: Scalar>(y: &[T], p: &Params, userw: bool, rw: &[T], season: &mut [T], trend: &mut [T]) {
    let n = y.len();
    let ext = n + 2 * p.np;
    let mut detrended = vec![T::zero(); n];
    let mut cycle = vec![T::zero(); ext];
    let mut low_pass = vec![T::zero(); n];
    let mut smoothed_lp = vec![T::zero(); n];
    let mut deseason = vec![T::zero(); n];
    for _ in 0..p.ni {
        for i in 0..n {
            detrended[i] = y[i] - trend[i];
        }
        cycle_subseries(&detrended, p, userw, rw, &mut cycle);
        moving_average_filter(&cycle, p.np, &mut low_pass);
        loess(&low_pass, p.nl, p.ildeg, p.nljump, None, &mut smoothed_lp);
        for i in 0..n {
            season[i] = cycle[p.np + i] - smoothed_lp[i];
            deseason[i] = y[i] - season[i];
        }
        loess(&deseason, p.nt, p.itdeg, p.ntjump, userw.then_some(rw), trend);
    }
}

/// Smooth each cycle-subseries and extend it by one period at both ends.
fn cycle_subseries<T: Scalar>(y: &[T], p: &Params, userw: bool, rw: &[T], out: &mut [T]) {
    let n = y.len();
    for j in 0..p.np {
        let k = (n - j - 1) / p.np + 1;
        let sub: Vec<T> = (0..k).map(|i| y[i * p.np + j]).collect();
        let sub_rw: Vec<T> = (0..k).map(|i| rw[i * p.np + j]).collect();
        let weights = userw.then_some(sub_rw.as_slice());
        let mut fitted = vec![T::zero(); k + 2];
        loess(&sub, p.ns, p.isdeg, p.nsjump, weights, &mut fitted[1..=k]);

        let nright = p.ns.min(k);
        fitted[0] = local_fit(&sub, p.ns, p.isdeg, T::zero(), 1, nright, weights).unwrap_or(fitted[1]);
        let nleft = (k as isize - p.ns as isize + 1).max(1) as usize;
        fitted[k + 1] = local_fit(&sub, p.ns, p.isdeg, T::of_usize(k + 1), nleft, k, weights).unwrap_or(fitted[k]);

        for (m, v) in fitted.into_iter().enumerate() {
            out[m * p.np + j] = v;
        }
    }
}

fn moving_average<T: Scalar>(x: &[T], len: usize) -> Vec<T> {
    let out_len = x.len() + 1 - len;
    let flen = T::of_usize(len);
    let mut out = Vec::with_capacity(out_len);
    let mut acc: T = x[..len].iter().copied().sum();
    out.push(acc / flen);
    for i in 1..out_len {
        acc = acc - x[i - 1] + x[i + len - 1];
        out.push(acc / flen);
    }
    out
}

/// MA(np) . MA(np) . MA(3): maps a series of length n + 2np to length n.
fn moving_average_filter<T: Scalar>(x: &[T], np: usize, out: &mut [T]) {
    let a = moving_average(x, np);
    let b = moving_average(&a, np);
    let c = moving_average(&b, 3);
    out.copy_from_slice(&c);
}

/// Tricube-weighted local polynomial (degree 0 or 1) at position `xs`,
/// using points `nleft..=nright`. `None` when all weights vanish.
fn local_fit<T: Scalar>(
    y: &[T],
    len: usize,
    degree: usize,
    xs: T,
    nleft: usize,
    nright: usize,
    rw: Option<&[T]>,
) -> Option<T> {
    let n = y.len();
    let range = T::of_usize(n) - T::one();
    let mut h = (xs - T::of_usize(nleft)).max(T::of_usize(nright) - xs);
    if len > n {
        h += T::of_usize((len - n) / 2);
    }
    let h9 = T::of(0.999) * h;
    let h1 = T::of(0.001) * h;
    let mut w = vec![T::zero(); nright - nleft + 1];
    let mut total = T::zero();
    for (slot, j) in w.iter_mut().zip(nleft..=nright) {
        let r = (T::of_usize(j) - xs).abs();
        if r <= h9 {
            let mut wj = if r <= h1 {
                T::one()
            } else {
                let q = r / h;
                let t = T::one() - q * q * q;
                t * t * t
            };
            if let Some(rw) = rw {
                wj *= rw[j - 1];
            }
            *slot = wj;
            total += wj;
        }
    }
    if total <= T::zero() {
        return None;
    }
    for wj in &mut w {
        *wj /= total;
    }
    if h > T::zero() && degree > 0 {
        let a: T = w.iter().zip(nleft..=nright).map(|(&wj, j)| wj * T::of_usize(j)).sum();
        let c: T = w
            .iter()
            .zip(nleft..=nright)
            .map(|(&wj, j)| {
                let d = T::of_usize(j) - a;
                wj * d * d
            })
            .sum();
        if c.sqrt() > T::of(0.001) * range {
            let b = (xs - a) / c;
            for (wj, j) in w.iter_mut().zip(nleft..=nright) {
                *wj *= b * (T::of_usize(j) - a) + T::one();
            }
        }
    }
    Some(w.iter().zip(&y[nleft - 1..nright]).map(|(&wj, &yj)| wj * yj).sum())
}

fn loess<T: Scalar>(y: &[T], len: usize, degree: usize, jump: usize, rw: Option<&[T]>, ys: &mut [T]) {
    let n = y.len();
    if n < 2 {
        ys[0] = y[0];
        return;
    }
    let nj = jump.min(n - 1);
    let at = |i: usize, nleft: usize, nright: usize| local_fit(y, len, degree, T::of_usize(i), nleft, nright, rw);

    if len >= n {
        for i in (1..=n).step_by(nj) {
            ys[i - 1] = at(i, 1, n).unwrap_or(y[i - 1]);
        }
    } else if nj == 1 {
        let nsh = len.div_ceil(2);
        let (mut nleft, mut nright) = (1, len);
        for i in 1..=n {
            if i > nsh && nright != n {
                nleft += 1;
                nright += 1;
            }
            ys[i - 1] = at(i, nleft, nright).unwrap_or(y[i - 1]);
        }
    } else {
        let nsh = len.div_ceil(2);
        for i in (1..=n).step_by(nj) {
            let (nleft, nright) = if i < nsh {
                (1, len)
            } else if i > n - nsh {
                (n - len + 1, n)
            } else {
                (i - nsh + 1, len + i - nsh)
            };
            ys[i - 1] = at(i, nleft, nright).unwrap_or(y[i - 1]);
        }
    }

    if nj == 1 {
        return;
    }
    let fj = T::of_usize(nj);
    let mut i = 1;
    while i + nj <= n {
        let delta = (ys[i + nj - 1] - ys[i - 1]) / fj;
        for j in (i + 1)..(i + nj) {
            ys[j - 1] = ys[i - 1] + delta * T::of_usize(j - i);
        }
        i += nj;
    }
    let k = ((n - 1) / nj) * nj + 1;
    if k != n {
        ys[n - 1] = at(n, (n + 1).saturating_sub(len).max(1), n).unwrap_or(y[n - 1]);
        if k != n - 1 {
            let delta = (ys[n - 1] - ys[k - 1]) / T::of_usize(n - k);
            for j in (k + 1)..n {
                ys[j - 1] = ys[k - 1] + delta * T::of_usize(j - k);
            }
        }
    }
}

/// Bisquare weights from residuals scaled by six median absolute residuals.
fn robustness_weights<T: Scalar>(y: &[T], fit: &[T], rw: &mut [T]) {
    let r: Vec<T> = y.iter().zip(fit).map(|(&a, &b)| (a - b).abs()).collect();
    let mut sorted = r.clone();
    sorted.sort_by(|a, b| a.total_cmp_finite(b));
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / T::of(2.0) };
    let cmad = T::of(6.0) * median;
    let c9 = T::of(0.999) * cmad;
    let c1 = T::of(0.001) * cmad;
    for (w, &ri) in rw.iter_mut().zip(&r) {
        *w = if ri <= c1 {
            T::one()
        } else if ri <= c9 {
            let q = ri / cmad;
            let t = T::one() - q * q;
            t * t
        } else {
            T::zero()
        };
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn default_spans() {
        assert_eq!(next_odd(1.5 * 12.0 / (1.0 - 1.5 / 7.0)), 23);
        assert_eq!(next_odd(12.0), 13);
    }

    #[test]
    fn csv_round_trip() {
        let y: Vec<f64> = (0..40).map(|t| (t as f64 * 0.7).sin() + 0.1 * t as f64).collect();
        let d = stl_decompose(&y, 12, &StlConfig::default()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(StlDecomposition::read_csv(&buf[..], 12).unwrap(), d);
    }

    #[test]
    fn too_short_series_rejected() {
        let y = vec![1.0; 23];
        assert!(matches!(stl_decompose(&y, 12, &StlConfig::default()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn pure_sine_goes_to_seasonal() {
        let y: Vec<f64> = (0..120).map(|t| (2.0 * PI * t as f64 / 12.0).sin()).collect();
        let d = stl_decompose(&y, 12, &StlConfig::default()).unwrap();
        for t in 0..y.len() {
            assert!((d.seasonal[t] - y[t]).abs() < 0.05, "t={t}: {}", d.seasonal[t]);
            assert!(d.trend[t].abs() < 0.05);
        }
    }

    #[test]
    fn ramp_goes_to_trend() {
        let y: Vec<f64> = (0..120).map(|t| 0.01 * t as f64).collect();
        let d = stl_decompose(&y, 12, &StlConfig::default()).unwrap();
        for t in 12..108 {
            assert!((d.trend[t] - y[t]).abs() < 0.05);
            assert!(d.seasonal[t].abs() < 0.05);
        }
    }

    #[test]
    fn components_re_sum() {
        let y: Vec<f64> = (0..60).map(|t| ((t * 7919) % 31) as f64 / 7.0 - 2.0).collect();
        let cfg = StlConfig { seasonal_jump: 2, trend_jump: 3, low_pass_jump: 2, outer_loops: 3, ..Default::default() };
        let d = stl_decompose(&y, 12, &cfg).unwrap();
        for t in 0..y.len() {
            assert!((d.trend[t] + d.seasonal[t] + d.residual[t] - y[t]).abs() < 1e-8);
        }
    }
}
