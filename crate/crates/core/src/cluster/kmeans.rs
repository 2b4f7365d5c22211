use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ClusterAssignment, FeatureSpace, Method};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeans {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
}

impl KMeans {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, restarts: 10, max_iter: 300 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit<T> {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    pub inertia: T,
    pub iterations: usize,
    /// Inertia after every assignment step, then the final value.
    pub inertia_history: Vec<T>,
    /// Index of the restart that won.
    pub restart: usize,
}

impl<T: Scalar> KMeansFit<T> {
    pub fn into_assignment(self, items: Vec<String>, feature_space: FeatureSpace) -> Result<ClusterAssignment> {
        let inertia = self.inertia.to_f64_lossy();
        let mut a = ClusterAssignment::new(items, &self.labels, Method::Kmeans, feature_space)?;
        a.inertia = Some(inertia);
        Ok(a)
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn nearest<T: Scalar>(p: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, sq_dist(p, &centroids[0]));
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn validate<T: Scalar>(points: &[Vec<T>], k: usize) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InsufficientData("k-means needs at least 2 points".into()));
    }
    if k == 0 || k > points.len() {
        return Err(Error::Parameter(format!("k={k} must be in 1..={}", points.len())));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch("ragged points".into()));
    }
    Ok(())
}

/// k-means++ seeding: first centre uniform, the rest with probability ∝ D².
fn plus_plus_init<T: Scalar>(points: &[Vec<T>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0]).to_f64_lossy()).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (slot, p) in d2.iter_mut().zip(points) {
            *slot = slot.min(sq_dist(p, &centroids[centroids.len() - 1]).to_f64_lossy());
        }
    }
    centroids
}

fn lloyd<T: Scalar>(points: &[Vec<T>], mut centroids: Vec<Vec<T>>, max_iter: usize, restart: usize) -> KMeansFit<T> {
    let k = centroids.len();
    let dim = points[0].len();
    let assign = |centroids: &[Vec<T>]| -> (Vec<usize>, T) {
        let mut inertia = T::zero();
        let labels = points
            .iter()
            .map(|p| {
                let (c, d) = nearest(p, centroids);
                inertia += d;
                c
            })
            .collect();
        (labels, inertia)
    };
    let means = |labels: &[usize], previous: &[Vec<T>]| -> (Vec<Vec<T>>, Vec<usize>) {
        let mut sums = vec![vec![T::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(labels) {
            counts[l] += 1;
            for (s, &x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        let centroids = sums
            .into_iter()
            .zip(&counts)
            .zip(previous)
            .map(
                |((s, &c), prev)| {
                    if c == 0 {
                        prev.clone()
                    } else {
                        s.into_iter().map(|x| x / T::of_usize(c)).collect()
                    }
                },
            )
            .collect();
        (centroids, counts)
    };

    let (mut labels, mut inertia) = assign(&centroids);
    let mut history = vec![inertia];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let (mut next, counts) = means(&labels, &centroids);
        if counts.contains(&0) {
            // re-seed empty clusters from the points farthest from their centroid
            let mut residual: Vec<T> = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &next[l])).collect();
            for c in (0..k).filter(|&c| counts[c] == 0) {
                let far = (0..points.len()).fold(0, |best, i| if residual[i] > residual[best] { i } else { best });
                next[c] = points[far].clone();
                residual[far] = T::zero();
            }
        }
        centroids = next;
        let (new_labels, new_inertia) = assign(&centroids);
        history.push(new_inertia);
        let stable = new_labels == labels;
        labels = new_labels;
        inertia = new_inertia;
        if stable {
            break;
        }
    }
    let (final_centroids, _) = means(&labels, &centroids);
    let final_inertia: T = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &final_centroids[l])).sum();
    if final_inertia <= inertia {
        inertia = final_inertia;
        centroids = final_centroids;
    }
    history.push(inertia);
    KMeansFit { labels, centroids, inertia, iterations, inertia_history: history, restart }
}

fn best_of<T: Scalar>(fits: Vec<KMeansFit<T>>) -> KMeansFit<T> {
    fits.into_iter()
        .reduce(|best, f| {
            if f.inertia < best.inertia || (f.inertia == best.inertia && f.restart < best.restart) {
                f
            } else {
                best
            }
        })
        .expect("at least one restart")
}

impl KMeans {
    /// Best of `restarts` seeded Lloyd runs. Restart `r` draws from stream
    /// `r` of a ChaCha generator keyed by `seed`, so results do not depend on
    /// scheduling.
    pub fn fit<T: Scalar>(&self, points: &[Vec<T>]) -> Result<KMeansFit<T>> {
        self.fit_with_init(points, None)
    }

    /// As [`fit`](Self::fit), with an extra deterministic start from `init`.
    pub fn fit_with_init<T: Scalar>(&self, points: &[Vec<T>], init: Option<Vec<Vec<T>>>) -> Result<KMeansFit<T>> {
        validate(points, self.k)?;
        let restarts = self.restarts.max(1);
        let mut fits: Vec<KMeansFit<T>> = (0..restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(r as u64);
                let init = plus_plus_init(points, self.k, &mut rng);
                lloyd(points, init, self.max_iter, r)
            })
            .collect();
        if let Some(init) = init {
            if init.len() != self.k {
                return Err(Error::Parameter(format!("initial centroids: {} given, k={}", init.len(), self.k)));
            }
            fits.push(lloyd(points, init, self.max_iter, restarts));
        }
        Ok(best_of(fits))
    }
}

/// `(k, WCSS)` for `k = 1..=k_max`.
///
/// Each `k` also runs Lloyd from the previous optimum plus the point farthest
/// from it, which makes the curve non-increasing.
pub fn elbow_curve<T: Scalar>(points: &[Vec<T>], k_max: usize, seed: u64) -> Result<Vec<(usize, T)>> {
    validate(points, k_max)?;
    let mut curve = Vec::with_capacity(k_max);
    let mut previous: Option<KMeansFit<T>> = None;
    for k in 1..=k_max {
        let warm = previous.as_ref().map(|prev| {
            let far = points
                .iter()
                .enumerate()
                .map(|(i, p)| (i, sq_dist(p, &prev.centroids[prev.labels[i]])))
                .fold((0, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best })
                .0;
            let mut init = prev.centroids.clone();
            init.push(points[far].clone());
            init
        });
        let fit = KMeans::new(k, seed).fit_with_init(points, warm)?;
        curve.push((k, fit.inertia));
        previous = Some(fit);
    }
    Ok(curve)
}
