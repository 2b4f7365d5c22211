//! Dense symmetric eigendecomposition (cyclic Jacobi), generic over the scalar.

use crate::scalar::Scalar;

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
}

/// `a` is row-major `n x n` and must be symmetric.
pub fn symmetric_eigen<T: Scalar>(a: &[T], n: usize) -> SymmetricEigen<T> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m = a.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let tol = T::epsilon() * T::epsilon() * scale * scale;

    for _sweep in 0..100 {
        let off: T =
            (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).map(|(p, q)| m[p * n + q] * m[p * n + q]).sum();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[b * n + b].total_cmp_finite(&m[a * n + a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<T> = (0..n).map(|r| v[r * n + k]).collect();
            // sign convention: largest-magnitude component positive
            let pivot = col.iter().fold(T::zero(), |acc, &x| if x.abs() > acc.abs() { x } else { acc });
            if pivot < T::zero() {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalises_small_matrix() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 1.0];
        let e = symmetric_eigen(&a, 3);
        for (lambda, vec) in e.values.iter().zip(&e.vectors) {
            for r in 0..3 {
                let av: f64 = (0..3).map(|c| a[r * 3 + c] * vec[c]).sum();
                assert!((av - lambda * vec[r]).abs() < 1e-12);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let a = [2.0f32, 0.0, 0.0, 1.0];
        let e = symmetric_eigen(&a, 2);
        assert_eq!(e.values, vec![2.0, 1.0]);
    }
}
