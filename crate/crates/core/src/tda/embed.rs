use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major set of points in R^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    coords: Vec<T>,
    dim: usize,
    pub source_label: String,
    /// `(window, delay)` when the cloud came from a delay embedding.
    pub embed_params: Option<(usize, usize)>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn from_rows(rows: &[Vec<T>], source_label: impl Into<String>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("ragged point rows".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        Ok(Self { coords: rows.concat(), dim, source_label: source_label.into(), embed_params: None })
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks(self.dim.max(1))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.points().map(<[T]>::to_vec).collect()
    }
}

/// Sliding-window embedding `v_t = (x_t, x_{t-delay}, ..., x_{t-(window-1)delay})`.
pub fn delay_embed<T: Scalar>(series: &[T], window: usize, delay: usize, label: &str) -> Result<PointCloud<T>> {
    if window == 0 || delay == 0 {
        return Err(Error::Parameter(format!("window and delay must be positive (got d={window}, tau={delay})")));
    }
    let span = (window - 1) * delay;
    if series.len() <= span {
        return Err(Error::EmbeddingTooShort { len: series.len(), window, delay, required: span + 1 });
    }
    let rows: Vec<Vec<T>> =
        (span..series.len()).map(|t| (0..window).map(|k| series[t - k * delay]).collect()).collect();
    let mut cloud = PointCloud::from_rows(&rows, label)?;
    cloud.embed_params = Some((window, delay));
    Ok(cloud)
}
