use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tda::DistanceMatrix;

fn cluster_count(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Mean silhouette over items; members of singleton clusters score 0.
pub fn silhouette<T: Scalar>(dist: &DistanceMatrix<T>, labels: &[usize]) -> Result<T> {
    let n = dist.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!("{} labels for {n} items", labels.len())));
    }
    let k = cluster_count(labels);
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    if sizes.iter().filter(|s| **s > 0).count() < 2 {
        return Err(Error::UndefinedMetric("silhouette needs at least 2 clusters".into()));
    }
    let mut total = T::zero();
    let mut sums = vec![T::zero(); k];
    for i in 0..n {
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = T::zero());
        for j in 0..n {
            if j != i {
                sums[labels[j]] += dist.get(i, j);
            }
        }
        let a = sums[own] / T::of_usize(sizes[own] - 1);
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / T::of_usize(sizes[c]))
            .fold(T::infinity(), T::min);
        let denom = a.max(b);
        if denom > T::zero() {
            total += (b - a) / denom;
        }
    }
    Ok(total / T::of_usize(n))
}

/// `[tr(B)/(k-1)] / [tr(W)/(n-k)]`; `+inf` when the within-cluster scatter is zero.
pub fn calinski_harabasz<T: Scalar>(points: &[Vec<T>], labels: &[usize]) -> Result<T> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!("{} labels for {n} points", labels.len())));
    }
    let k = cluster_count(labels);
    if k < 2 {
        return Err(Error::UndefinedMetric("Calinski-Harabasz needs at least 2 clusters".into()));
    }
    if n <= k {
        return Err(Error::UndefinedMetric(format!("Calinski-Harabasz needs n > k (n={n}, k={k})")));
    }
    let dim = points[0].len();
    let mut centroids = vec![vec![T::zero(); dim]; k];
    let mut sizes = vec![0usize; k];
    let mut global = vec![T::zero(); dim];
    for (p, &l) in points.iter().zip(labels) {
        sizes[l] += 1;
        for d in 0..dim {
            centroids[l][d] += p[d];
            global[d] += p[d];
        }
    }
    for (c, &s) in centroids.iter_mut().zip(&sizes) {
        if s > 0 {
            c.iter_mut().for_each(|x| *x /= T::of_usize(s));
        }
    }
    global.iter_mut().for_each(|x| *x /= T::of_usize(n));

    let mut between = T::zero();
    for (c, &s) in centroids.iter().zip(&sizes) {
        let d2: T = c.iter().zip(&global).map(|(&a, &b)| (a - b) * (a - b)).sum();
        between += T::of_usize(s) * d2;
    }
    let within: T = points
        .iter()
        .zip(labels)
        .map(|(p, &l)| p.iter().zip(&centroids[l]).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>())
        .sum();
    if within == T::zero() {
        return Ok(T::infinity());
    }
    Ok((between / T::of_usize(k - 1)) / (within / T::of_usize(n - k)))
}

type Counts<K> = HashMap<K, usize>;

fn contingency(a: &[usize], b: &[usize]) -> (Counts<(usize, usize)>, Counts<usize>, Counts<usize>) {
    let mut joint = HashMap::new();
    let mut ra = HashMap::new();
    let mut rb = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_insert(0) += 1;
        *ra.entry(x).or_insert(0) += 1;
        *rb.entry(y).or_insert(0) += 1;
    }
    (joint, ra, rb)
}

fn pairs(n: usize) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

fn check_same_length(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::MismatchedItems(format!("{} vs {} items", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("no items to compare".into()));
    }
    Ok(())
}

/// Adjusted Rand index from the contingency table. When the chance-corrected
/// denominator vanishes both partitions are the same trivial partition and
/// the index is 1.
pub fn adjusted_rand(a: &[usize], b: &[usize]) -> Result<f64> {
    check_same_length(a, b)?;
    let (joint, ra, rb) = contingency(a, b);
    let mut cells: Vec<usize> = joint.values().copied().collect();
    cells.sort_unstable();
    let index: f64 = cells.iter().map(|&c| pairs(c)).sum();
    let mut rows: Vec<usize> = ra.values().copied().collect();
    let mut cols: Vec<usize> = rb.values().copied().collect();
    rows.sort_unstable();
    cols.sort_unstable();
    let sum_a: f64 = rows.iter().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.iter().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(a.len());
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nmi {
    pub value: f64,
    /// Set when either partition has a single cluster (zero entropy).
    pub degenerate: bool,
}

/// `I(a; b) / sqrt(H(a) H(b))` with natural logarithms.
pub fn normalized_mutual_info(a: &[usize], b: &[usize]) -> Result<Nmi> {
    check_same_length(a, b)?;
    let n = a.len() as f64;
    let (joint, ra, rb) = contingency(a, b);
    let entropy = |m: &HashMap<usize, usize>| {
        let mut counts: Vec<usize> = m.values().copied().collect();
        counts.sort_unstable();
        -counts.iter().map(|&c| c as f64 / n).map(|p| p * p.ln()).sum::<f64>()
    };
    let (ha, hb) = (entropy(&ra), entropy(&rb));
    if ra.len() < 2 || rb.len() < 2 {
        return Ok(Nmi { value: 0.0, degenerate: true });
    }
    let mut cells: Vec<((usize, usize), usize)> = joint.into_iter().collect();
    cells.sort_unstable();
    let mi: f64 = cells
        .iter()
        .map(|&((x, y), c)| {
            let pxy = c as f64 / n;
            pxy * (pxy * n * n / (ra[&x] as f64 * rb[&y] as f64)).ln()
        })
        .sum();
    let value = (mi / (ha * hb).sqrt()).clamp(0.0, 1.0);
    Ok(Nmi { value, degenerate: false })
}

/// Pearson correlation between the upper triangles of two distance matrices.
pub fn mantel<T: Scalar>(a: &DistanceMatrix<T>, b: &DistanceMatrix<T>) -> Result<T> {
    if a.labels() != b.labels() {
        return Err(Error::MismatchedItems("distance matrices carry different labels".into()));
    }
    if a.len() < 3 {
        return Err(Error::InsufficientData("Mantel correlation needs n >= 3".into()));
    }
    let x = a.as_matrix().upper_triangle();
    let y = b.as_matrix().upper_triangle();
    crate::stats::pearson(&x, &y).ok_or_else(|| Error::UndefinedMetric("constant upper triangle".into()))
}
