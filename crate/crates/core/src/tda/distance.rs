use std::io::{Read, Write};

use super::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::SymmetricMatrix;

/// Symmetric, zero-diagonal, non-negative matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T>(SymmetricMatrix<T>);

impl<T: Scalar> DistanceMatrix<T> {
    pub fn new(matrix: SymmetricMatrix<T>) -> Result<Self> {
        for i in 0..matrix.len() {
            if matrix.get(i, i) != T::zero() {
                return Err(Error::Domain(format!("non-zero diagonal at `{}`", matrix.labels()[i])));
            }
            if let Some(v) = matrix.row(i).iter().find(|v| !v.is_finite() || **v < T::zero()) {
                return Err(Error::Domain(format!("invalid distance {v} in row `{}`", matrix.labels()[i])));
            }
        }
        Ok(Self(matrix))
    }

    pub fn from_fn(labels: Vec<String>, mut dist: impl FnMut(usize, usize) -> T) -> Result<Self> {
        Self::new(SymmetricMatrix::from_fn(labels, |i, j| if i == j { T::zero() } else { dist(i, j) }))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.0.get(i, j)
    }

    pub fn labels(&self) -> &[String] {
        self.0.labels()
    }

    pub fn as_matrix(&self) -> &SymmetricMatrix<T> {
        &self.0
    }

    pub fn max_distance(&self) -> T {
        self.0.upper_triangle().into_iter().fold(T::zero(), T::max)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.0.write_csv(writer)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        Self::new(SymmetricMatrix::read_csv(reader)?)
    }
}

pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Euclidean distances between all points, each pair computed once.
pub fn pairwise_distances<T: Scalar>(cloud: &PointCloud<T>) -> DistanceMatrix<T> {
    let labels = (0..cloud.len()).map(|i| i.to_string()).collect();
    DistanceMatrix::from_fn(labels, |i, j| euclidean(cloud.point(i), cloud.point(j)))
        .expect("Euclidean distances of finite points are valid")
}

/// Euclidean distances between labelled feature rows.
pub fn row_distances<T: Scalar>(labels: &[String], rows: &[Vec<T>]) -> Result<DistanceMatrix<T>> {
    if labels.len() != rows.len() {
        return Err(Error::DimensionMismatch(format!("{} labels for {} rows", labels.len(), rows.len())));
    }
    DistanceMatrix::from_fn(labels.to_vec(), |i, j| euclidean(&rows[i], &rows[j]))
}
