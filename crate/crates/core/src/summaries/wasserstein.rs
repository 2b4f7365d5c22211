use rayon::prelude::*;

use super::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tda::{DistanceMatrix, PersistenceDiagram};

/// Order `p` of the transport cost and exponent `q` of the ground metric
/// in the birth–death plane (`q = inf` for the max norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WassersteinParams<T> {
    pub p: T,
    pub q: T,
    /// Treat essential classes as pairs dying at `eps_max` instead of dropping them.
    pub include_essential: bool,
}

impl<T: Scalar> Default for WassersteinParams<T> {
    fn default() -> Self {
        Self { p: T::of(2.0), q: T::of(2.0), include_essential: false }
    }
}

fn ground<T: Scalar>(q: T, db: T, dd: T) -> T {
    let (db, dd) = (db.abs(), dd.abs());
    if q.is_infinite() {
        db.max(dd)
    } else {
        (db.powf(q) + dd.powf(q)).powf(q.recip())
    }
}

/// Ground distance from `(b, d)` to its orthogonal projection on the diagonal.
fn to_diagonal<T: Scalar>(q: T, (b, d): (T, T)) -> T {
    let half = (d - b).abs() / T::of(2.0);
    ground(q, half, half)
}

fn canonical_points<T: Scalar>(dgm: &PersistenceDiagram<T>, include_essential: bool) -> Vec<(T, T)> {
    let mut pts: Vec<(T, T)> = if include_essential {
        dgm.pairs_with_essential().iter().map(|p| (p.birth, p.death)).collect()
    } else {
        dgm.pairs.iter().map(|p| (p.birth, p.death)).collect()
    };
    pts.sort_by(|a, b| a.0.total_cmp_finite(&b.0).then(a.1.total_cmp_finite(&b.1)));
    pts
}

fn lex_cmp<T: Scalar>(a: &[(T, T)], b: &[(T, T)]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.0.total_cmp_finite(&y.0).then(x.1.total_cmp_finite(&y.1)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Augmented `(n+m) x (n+m)` cost matrix with entries raised to `p`.
fn augmented_costs<T: Scalar>(a: &[(T, T)], b: &[(T, T)], p: T, q: T) -> Vec<T> {
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let mut cost = vec![T::zero(); size * size];
    for i in 0..size {
        for j in 0..size {
            cost[i * size + j] = match (i < n, j < m) {
                (true, true) => ground(q, a[i].0 - b[j].0, a[i].1 - b[j].1).powf(p),
                (true, false) => to_diagonal(q, a[i]).powf(p),
                (false, true) => to_diagonal(q, b[j]).powf(p),
                (false, false) => T::zero(),
            };
        }
    }
    cost
}

/// p-Wasserstein distance between two diagrams of the same degree.
///
/// Inputs are put in a canonical order first, so the result is bitwise
/// symmetric and independent of pair order.
pub fn wasserstein<T: Scalar>(
    a: &PersistenceDiagram<T>,
    b: &PersistenceDiagram<T>,
    params: &WassersteinParams<T>,
) -> Result<T> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch(format!("cannot compare H{} with H{}", a.dimension, b.dimension)));
    }
    if !(params.p >= T::one()) || !params.p.is_finite() || !(params.q >= T::one()) {
        return Err(Error::Parameter(format!("need finite p >= 1 and q >= 1, got p={}, q={}", params.p, params.q)));
    }
    let mut x = canonical_points(a, params.include_essential);
    let mut y = canonical_points(b, params.include_essential);
    if lex_cmp(&x, &y).is_gt() {
        std::mem::swap(&mut x, &mut y);
    }
    let size = x.len() + y.len();
    if size == 0 {
        return Ok(T::zero());
    }
    let cost = augmented_costs(&x, &y, params.p, params.q);
    let assignment = min_cost_assignment(&cost, size);
    let mut chosen: Vec<T> = assignment.iter().enumerate().map(|(r, &c)| cost[r * size + c]).collect();
    chosen.sort_by(T::total_cmp_finite);
    let total: T = chosen.into_iter().sum();
    Ok(total.powf(params.p.recip()))
}

/// Bottleneck distance (max-norm ground metric); essential classes are ignored.
pub fn bottleneck<T: Scalar>(a: &PersistenceDiagram<T>, b: &PersistenceDiagram<T>) -> Result<T> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch(format!("cannot compare H{} with H{}", a.dimension, b.dimension)));
    }
    let x = canonical_points(a, false);
    let y = canonical_points(b, false);
    let (n, m) = (x.len(), y.len());
    let size = n + m;
    if size == 0 {
        return Ok(T::zero());
    }
    let inf = T::infinity();
    let mut cost = vec![T::zero(); size * size];
    for i in 0..size {
        for j in 0..size {
            cost[i * size + j] = match (i < n, j < m) {
                (true, true) => ground(inf, x[i].0 - y[j].0, x[i].1 - y[j].1),
                (true, false) => to_diagonal(inf, x[i]),
                (false, true) => to_diagonal(inf, y[j]),
                (false, false) => T::zero(),
            };
        }
    }
    let mut candidates = cost.clone();
    candidates.sort_by(T::total_cmp_finite);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&cost, size, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Kuhn's augmenting-path search on edges with cost <= threshold.
fn has_perfect_matching<T: Scalar>(cost: &[T], size: usize, threshold: T) -> bool {
    fn augment<T: Scalar>(
        row: usize,
        cost: &[T],
        size: usize,
        threshold: T,
        visited: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..size {
            if cost[row * size + col] <= threshold && !visited[col] {
                visited[col] = true;
                if match_col[col].is_none_or(|r| augment(r, cost, size, threshold, visited, match_col)) {
                    match_col[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    let mut match_col = vec![None; size];
    for row in 0..size {
        let mut visited = vec![false; size];
        if !augment(row, cost, size, threshold, &mut visited, &mut match_col) {
            return false;
        }
    }
    true
}

/// Weighted sum over homology degrees of pairwise Wasserstein distances.
///
/// `diagrams[i]` holds the diagrams of item `i` indexed by degree;
/// `dim_weights[k]` weights degree `k`. Pairs are computed in parallel and
/// assembled in a fixed order.
pub fn diagram_distance_matrix<T: Scalar>(
    labels: &[String],
    diagrams: &[Vec<PersistenceDiagram<T>>],
    params: &WassersteinParams<T>,
    dim_weights: &[T],
) -> Result<DistanceMatrix<T>> {
    if labels.len() != diagrams.len() {
        return Err(Error::DimensionMismatch(format!("{} labels for {} diagram sets", labels.len(), diagrams.len())));
    }
    for (label, set) in labels.iter().zip(diagrams) {
        for k in 0..dim_weights.len() {
            if !set.iter().any(|d| d.dimension == k) {
                return Err(Error::MissingDiagram(format!("{label} (H{k})")));
            }
        }
    }
    let degree = |set: &[PersistenceDiagram<T>], k: usize| set.iter().find(|d| d.dimension == k).cloned();
    let n = labels.len();
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let upper: Vec<T> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let mut total = T::zero();
            for (k, &w) in dim_weights.iter().enumerate() {
                if w == T::zero() {
                    continue;
                }
                let a = degree(&diagrams[i], k).expect("checked above");
                let b = degree(&diagrams[j], k).expect("checked above");
                total += w * wasserstein(&a, &b, params)?;
            }
            Ok(total)
        })
        .collect::<Result<_>>()?;
    let matrix = crate::stats::SymmetricMatrix::from_upper(labels.to_vec(), T::zero(), &upper)?;
    DistanceMatrix::new(matrix)
}
