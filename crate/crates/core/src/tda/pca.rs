use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T> {
    /// One `out_dim`-vector per input row.
    pub coords: Vec<Vec<T>>,
    /// Share of total variance captured by each retained component.
    pub explained_variance_ratio: Vec<T>,
}

/// Centre the rows and project them onto the leading principal axes.
///
/// Works through the rows x rows Gram matrix, so wide feature vectors
/// (stacked landscapes) stay cheap.
pub fn pca_project<T: Scalar>(rows: &[Vec<T>], out_dim: usize) -> Result<Projection<T>> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData("PCA needs at least 2 rows".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged feature rows".into()));
    }
    if out_dim == 0 || out_dim > (n - 1).min(cols) {
        return Err(Error::Parameter(format!("out_dim {out_dim} must be in 1..={}", (n - 1).min(cols))));
    }
    let mean: Vec<T> = (0..cols).map(|c| rows.iter().map(|r| r[c]).sum::<T>() / T::of_usize(n)).collect();
    let centred: Vec<Vec<T>> = rows.iter().map(|r| r.iter().zip(&mean).map(|(&x, &m)| x - m).collect()).collect();

    let mut gram = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let g: T = centred[i].iter().zip(&centred[j]).map(|(&a, &b)| a * b).sum();
            gram[i * n + j] = g;
            gram[j * n + i] = g;
        }
    }
    let eig = symmetric_eigen(&gram, n);
    let total: T = eig.values.iter().map(|&v| v.max(T::zero())).sum();

    let mut coords = vec![vec![T::zero(); out_dim]; n];
    let mut ratios = Vec::with_capacity(out_dim);
    for k in 0..out_dim {
        let lambda = eig.values[k].max(T::zero());
        let sigma = lambda.sqrt();
        for (i, row) in coords.iter_mut().enumerate() {
            row[k] = eig.vectors[k][i] * sigma;
        }
        ratios.push(if total > T::zero() { lambda / total } else { T::zero() });
    }
    Ok(Projection { coords, explained_variance_ratio: ratios })
}
