use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair<T> {
    pub birth: T,
    pub death: T,
}

impl<T: Scalar> PersistencePair<T> {
    pub fn new(birth: T, death: T) -> Self {
        Self { birth, death }
    }

    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

/// Finite `(birth, death)` pairs of one homology degree plus the births of
/// classes still alive at the filtration ceiling `eps_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram<T> {
    pub dimension: usize,
    pub pairs: Vec<PersistencePair<T>>,
    pub essential: Vec<T>,
    pub eps_max: T,
}

impl<T: Scalar> PersistenceDiagram<T> {
    pub fn new(dimension: usize, pairs: Vec<PersistencePair<T>>, essential: Vec<T>, eps_max: T) -> Self {
        Self { dimension, pairs, essential, eps_max }
    }

    pub fn empty(dimension: usize, eps_max: T) -> Self {
        Self::new(dimension, Vec::new(), Vec::new(), eps_max)
    }

    pub fn essential_count(&self) -> usize {
        self.essential.len()
    }

    /// Finite pairs followed by essential classes truncated at `eps_max`.
    pub fn pairs_with_essential(&self) -> Vec<PersistencePair<T>> {
        let mut out = self.pairs.clone();
        out.extend(self.essential.iter().map(|&b| PersistencePair::new(b, self.eps_max)));
        out
    }

    /// Finite pairs sorted by (birth, death); handy for multiset comparison.
    pub fn sorted_pairs(&self) -> Vec<(T, T)> {
        let mut v: Vec<(T, T)> = self.pairs.iter().map(|p| (p.birth, p.death)).collect();
        v.sort_by(|a, b| a.0.total_cmp_finite(&b.0).then(a.1.total_cmp_finite(&b.1)));
        v
    }
}

/// Rows of `dimension,birth,death,essential`; essential rows carry `death = eps_max`.
pub fn write_diagrams_csv<W: Write, T: Scalar>(diagrams: &[PersistenceDiagram<T>], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["dimension", "birth", "death", "essential"])?;
    for dgm in diagrams {
        for p in &dgm.pairs {
            out.write_record([dgm.dimension.to_string(), p.birth.to_string(), p.death.to_string(), "0".into()])?;
        }
        for b in &dgm.essential {
            out.write_record([dgm.dimension.to_string(), b.to_string(), dgm.eps_max.to_string(), "1".into()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Inverse of [`write_diagrams_csv`] for dimensions `0..=max_dim`.
///
/// The ceiling is recovered from any essential row (all dimensions share it).
pub fn read_diagrams_csv<R: Read, T: Scalar>(reader: R, max_dim: usize) -> Result<Vec<PersistenceDiagram<T>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut diagrams: Vec<PersistenceDiagram<T>> =
        (0..=max_dim).map(|k| PersistenceDiagram::empty(k, T::zero())).collect();
    let mut ceiling: Option<T> = None;
    let mut max_death = T::zero();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse { line, message: format!("bad {what}") };
        let dim: usize = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("dimension"))?;
        let birth = rec.get(1).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| bad("birth"))?;
        let death = rec.get(2).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| bad("death"))?;
        let essential = rec.get(3).ok_or_else(|| bad("essential flag"))? == "1";
        let dgm = diagrams.get_mut(dim).ok_or_else(|| bad("dimension"))?;
        let (birth, death) = (T::of(birth), T::of(death));
        if essential {
            dgm.essential.push(birth);
            ceiling = Some(death);
        } else {
            dgm.pairs.push(PersistencePair::new(birth, death));
            max_death = max_death.max(death);
        }
    }
    let eps = ceiling.unwrap_or(max_death);
    diagrams.iter_mut().for_each(|d| d.eps_max = eps);
    Ok(diagrams)
}
