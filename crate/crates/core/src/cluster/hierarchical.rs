use std::io::{Read, Write};

use super::{ClusterAssignment, FeatureSpace, Method};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tda::DistanceMatrix;

/// One agglomeration step. Leaves are `0..n`; the cluster created by step
/// `s` gets id `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<T> {
    pub a: usize,
    pub b: usize,
    pub height: T,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    pub merges: Vec<Merge<T>>,
    pub n_leaves: usize,
    pub labels: Vec<String>,
}

/// Complete-linkage agglomeration on a precomputed distance matrix.
///
/// Linkages are maintained with the Lance–Williams update
/// `d(a∪b, x) = max(d(a, x), d(b, x))`. Equal linkages go to the pair with
/// the smallest `(min id, max id)`.
pub fn complete_linkage<T: Scalar>(dist: &DistanceMatrix<T>) -> Dendrogram<T> {
    let n = dist.len();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes = vec![1usize; n];
    let mut link: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| dist.get(i, j)).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best: Option<(T, (usize, usize), usize, usize)> = None;
        for (x, &si) in active.iter().enumerate() {
            for &sj in &active[x + 1..] {
                let key = (ids[si].min(ids[sj]), ids[si].max(ids[sj]));
                let h = link[si][sj];
                let better = match best {
                    None => true,
                    Some((bh, bkey, _, _)) => h < bh || (h == bh && key < bkey),
                };
                if better {
                    best = Some((h, key, si, sj));
                }
            }
        }
        let (height, (a, b), si, sj) = best.expect("at least two active clusters");
        for &x in &active {
            if x != si && x != sj {
                let v = link[si][x].max(link[sj][x]);
                link[si][x] = v;
                link[x][si] = v;
            }
        }
        sizes[si] += sizes[sj];
        ids[si] = n + merges.len();
        active.retain(|&s| s != sj);
        merges.push(Merge { a, b, height, size: sizes[si] });
    }
    Dendrogram { merges, n_leaves: n, labels: dist.labels().to_vec() }
}

impl<T: Scalar> Dendrogram<T> {
    /// Flat labels with `k` clusters: undo the last `k - 1` merges.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("cannot cut {n} leaves into {k} clusters")));
        }
        let mut parent: Vec<usize> = (0..2 * n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, m) in self.merges.iter().take(n - k).enumerate() {
            let id = n + s;
            let (ra, rb) = (root(&mut parent, m.a), root(&mut parent, m.b));
            parent[ra] = id;
            parent[rb] = id;
        }
        let roots: Vec<usize> = (0..n).map(|i| root(&mut parent, i)).collect();
        Ok(super::canonical_labels(&roots))
    }

    /// `step,a,b,height,size` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["step", "a", "b", "height", "size"])?;
        for (s, m) in self.merges.iter().enumerate() {
            out.write_record([
                s.to_string(),
                m.a.to_string(),
                m.b.to_string(),
                m.height.to_string(),
                m.size.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Leaf labels are not part of the merge list and must be supplied.
    pub fn read_csv<R: Read>(reader: R, labels: Vec<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut merges = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |i: usize| rec.get(i).ok_or(Error::Parse { line, message: format!("missing field {i}") });
            let int = |i: usize| -> Result<usize> {
                field(i)?.parse().map_err(|_| Error::Parse { line, message: format!("bad integer in field {i}") })
            };
            let height = field(3)?.parse::<f64>().map_err(|_| Error::Parse { line, message: "bad height".into() })?;
            merges.push(Merge { a: int(1)?, b: int(2)?, height: T::of(height), size: int(4)? });
        }
        Ok(Self { n_leaves: labels.len(), merges, labels })
    }
}

/// Complete-linkage dendrogram and its `k`-cluster cut.
pub fn hierarchical_complete<T: Scalar>(
    dist: &DistanceMatrix<T>,
    k: usize,
    feature_space: FeatureSpace,
) -> Result<(Dendrogram<T>, ClusterAssignment)> {
    if dist.is_empty() {
        return Err(Error::InsufficientData("empty distance matrix".into()));
    }
    let dendrogram = complete_linkage(dist);
    let labels = dendrogram.cut(k)?;
    let assignment = ClusterAssignment::new(dist.labels().to_vec(), &labels, Method::Hierarchical, feature_space)?;
    Ok((dendrogram, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(n: usize, upper: &[f64]) -> DistanceMatrix<f64> {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        DistanceMatrix::new(crate::stats::SymmetricMatrix::from_upper(labels, 0.0, upper).unwrap()).unwrap()
    }

    #[test]
    fn forced_merge_order() {
        // d(0,1)=1, d(0,2)=10, d(1,2)=1 -> tie at 1 broken by (0,1)
        let d = complete_linkage(&dm(3, &[1.0, 10.0, 1.0]));
        assert_eq!(d.merges[0], Merge { a: 0, b: 1, height: 1.0, size: 2 });
        assert_eq!(d.merges[1], Merge { a: 2, b: 3, height: 10.0, size: 3 });
    }

    #[test]
    fn cuts() {
        let d = dm(4, &[1.0, 5.0, 6.0, 5.5, 6.5, 2.0]);
        let (_, all) = hierarchical_complete(&d, 1, FeatureSpace::Tda).unwrap();
        assert_eq!(all.labels, vec![0; 4]);
        let (_, two) = hierarchical_complete(&d, 2, FeatureSpace::Tda).unwrap();
        assert_eq!(two.labels, vec![0, 0, 1, 1]);
        let (_, four) = hierarchical_complete(&d, 4, FeatureSpace::Tda).unwrap();
        assert_eq!(four.labels, vec![0, 1, 2, 3]);
        assert!(hierarchical_complete(&d, 5, FeatureSpace::Tda).is_err());
    }

    #[test]
    fn merge_list_round_trip() {
        let d = complete_linkage(&dm(4, &[1.0, 5.0, 6.0, 5.5, 6.5, 2.0]));
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Dendrogram::<f64>::read_csv(buf.as_slice(), d.labels.clone()).unwrap();
        assert_eq!(back, d);
    }
}
