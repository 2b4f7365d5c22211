use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Scalar;
use crate::tda::{DistanceMatrix, PointCloud};

#[derive(Debug, Clone, PartialEq)]
pub struct MdsEmbedding<T> {
    pub cloud: PointCloud<T>,
    /// All eigenvalues of the double-centred matrix, descending, unclamped.
    pub eigenvalues: Vec<T>,
    /// Per retained axis: its eigenvalue over the total positive eigenvalue mass.
    pub explained: Vec<T>,
    /// Sum of the negative eigenvalues (zero for Euclidean input).
    pub negative_mass: T,
}

impl<T: Scalar> MdsEmbedding<T> {
    pub fn captured_fraction(&self) -> T {
        self.explained.iter().copied().sum()
    }
}

/// Classical (Torgerson) scaling: eigendecompose `-1/2 J D² J` and keep the
/// top `out_dim` axes, clamping negative eigenvalues to zero.
pub fn classical_mds<T: Scalar>(dist: &DistanceMatrix<T>, out_dim: usize) -> Result<MdsEmbedding<T>> {
    let n = dist.len();
    if out_dim == 0 || out_dim >= n {
        return Err(Error::Parameter(format!("MDS out_dim {out_dim} must be in 1..{n}")));
    }
    let sq: Vec<T> = (0..n * n)
        .map(|idx| {
            let d = dist.get(idx / n, idx % n);
            d * d
        })
        .collect();
    let nf = T::of_usize(n);
    let row_mean: Vec<T> = (0..n).map(|i| sq[i * n..(i + 1) * n].iter().copied().sum::<T>() / nf).collect();
    let grand = row_mean.iter().copied().sum::<T>() / nf;
    let half = T::of(0.5);
    let mut b = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = -half * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
            b[i * n + j] = v;
            b[j * n + i] = v;
        }
    }
    let eig = symmetric_eigen(&b, n);
    let positive: T = eig.values.iter().filter(|v| **v > T::zero()).copied().sum();
    let negative_mass: T = eig.values.iter().filter(|v| **v < T::zero()).copied().sum();

    let mut rows = vec![vec![T::zero(); out_dim]; n];
    let mut explained = Vec::with_capacity(out_dim);
    for k in 0..out_dim {
        let lambda = eig.values[k].max(T::zero());
        let s = lambda.sqrt();
        for (i, row) in rows.iter_mut().enumerate() {
            row[k] = eig.vectors[k][i] * s;
        }
        explained.push(if positive > T::zero() { lambda / positive } else { T::zero() });
    }
    let cloud = PointCloud::from_rows(&rows, "mds")?;
    Ok(MdsEmbedding { cloud, eigenvalues: eig.values, explained, negative_mass })
}
