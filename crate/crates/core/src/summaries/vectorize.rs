use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tda::PersistenceDiagram;

/// Half-open interval `[birth, death)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub birth: T,
    pub death: T,
}

/// Finite pairs as intervals, sorted by birth and then by decreasing length.
pub fn barcode<T: Scalar>(diagram: &PersistenceDiagram<T>) -> Vec<Interval<T>> {
    let mut bars: Vec<Interval<T>> =
        diagram.pairs.iter().map(|p| Interval { birth: p.birth, death: p.death }).collect();
    bars.sort_by(|a, b| {
        a.birth.total_cmp_finite(&b.birth).then((b.death - b.birth).total_cmp_finite(&(a.death - a.birth)))
    });
    bars
}

/// `grid_size` evenly spaced abscissae covering `[0, upper]`.
pub fn uniform_grid<T: Scalar>(upper: T, grid_size: usize) -> Vec<T> {
    match grid_size {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => {
            let step = upper / T::of_usize(grid_size - 1);
            (0..grid_size).map(|i| if i + 1 == grid_size { upper } else { step * T::of_usize(i) }).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceLandscape<T> {
    pub grid: Vec<T>,
    /// `layers[k][i]` is the (k+1)-th largest tent value at `grid[i]`.
    pub layers: Vec<Vec<T>>,
}

impl<T: Scalar> PersistenceLandscape<T> {
    /// Layers concatenated, for use as a feature vector.
    pub fn flatten(&self) -> Vec<T> {
        self.layers.concat()
    }

    /// `t,lambda_1,...,lambda_k` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.layers.len()).map(|k| format!("lambda_{k}")));
        out.write_record(&header)?;
        for (i, t) in self.grid.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(self.layers.iter().map(|l| l[i].to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let (header, rows) = crate::table::read_numeric::<R, T>(reader)?;
        if header.first().map(String::as_str) != Some("t") {
            return Err(Error::Parse { line: 1, message: "landscape header must start with `t`".into() });
        }
        let k = header.len() - 1;
        let grid = rows.iter().map(|r| r[0]).collect();
        let layers = (1..=k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Ok(Self { grid, layers })
    }
}

/// Landscape on a uniform grid over `[0, eps_max]` of the diagram.
pub fn landscape<T: Scalar>(
    diagram: &PersistenceDiagram<T>,
    num_layers: usize,
    grid_size: usize,
) -> PersistenceLandscape<T> {
    landscape_on_grid(diagram, num_layers, uniform_grid(diagram.eps_max, grid_size))
}

/// Landscape evaluated at arbitrary abscissae. Essential classes are ignored.
pub fn landscape_on_grid<T: Scalar>(
    diagram: &PersistenceDiagram<T>,
    num_layers: usize,
    grid: Vec<T>,
) -> PersistenceLandscape<T> {
    let mut layers = vec![vec![T::zero(); grid.len()]; num_layers];
    let mut tents = Vec::with_capacity(diagram.pairs.len());
    for (i, &t) in grid.iter().enumerate() {
        tents.clear();
        tents.extend(diagram.pairs.iter().map(|p| (t - p.birth).min(p.death - t)).filter(|v| *v > T::zero()));
        tents.sort_by(|a, b| b.total_cmp_finite(a));
        for (layer, &v) in layers.iter_mut().zip(&tents) {
            layer[i] = v;
        }
    }
    PersistenceLandscape { grid, layers }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BettiCurve<T> {
    pub dimension: usize,
    pub grid: Vec<T>,
    pub counts: Vec<usize>,
}

impl<T: Scalar> BettiCurve<T> {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["t", "count"])?;
        for (t, c) in self.grid.iter().zip(&self.counts) {
            out.write_record([t.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, dimension: usize) -> Result<Self> {
        let (header, rows) = crate::table::read_numeric::<R, T>(reader)?;
        crate::table::expect_header(&header, &["t", "count"])?;
        let grid = rows.iter().map(|r| r[0]).collect();
        let counts = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[1].to_usize().ok_or_else(|| Error::Parse {
                    line: i as u64 + 2,
                    message: "count is not a nonnegative integer".into(),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok(Self { dimension, grid, counts })
    }
}

pub fn betti_curve<T: Scalar>(diagram: &PersistenceDiagram<T>, grid_size: usize) -> BettiCurve<T> {
    betti_curve_on_grid(diagram, uniform_grid(diagram.eps_max, grid_size))
}

/// Number of classes with `birth <= t < death`; essential classes never die.
pub fn betti_curve_on_grid<T: Scalar>(diagram: &PersistenceDiagram<T>, grid: Vec<T>) -> BettiCurve<T> {
    let mut births: Vec<T> = diagram.pairs.iter().map(|p| p.birth).chain(diagram.essential.iter().copied()).collect();
    let mut deaths: Vec<T> = diagram.pairs.iter().map(|p| p.death).collect();
    births.sort_by(T::total_cmp_finite);
    deaths.sort_by(T::total_cmp_finite);
    let counts = grid
        .iter()
        .map(|&t| {
            let born = births.partition_point(|&b| b <= t);
            let dead = deaths.partition_point(|&d| d <= t);
            born - dead
        })
        .collect();
    BettiCurve { dimension: diagram.dimension, grid, counts }
}
