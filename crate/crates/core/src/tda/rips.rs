//! Vietoris–Rips persistent homology in degrees 0 and 1 over Z/2.
//!
//! Degree 0 is a Kruskal sweep. Degree 1 reduces the coboundary matrix of the
//! edges in reverse filtration order; edges that kill a component are cleared
//! up front, and only the reduction bookkeeping (which edges were added) is
//! stored, coboundaries are regenerated on demand.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{DistanceMatrix, PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Edge<T> {
    diam: T,
    u: usize,
    v: usize,
}

/// Triangle `{i < j < k}` keyed by its combinatorial index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Triangle<T> {
    diam: T,
    key: u64,
}

impl<T: Scalar> Triangle<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diam.total_cmp_finite(&other.diam).then(self.key.cmp(&other.key))
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

fn triangle_key(mut a: usize, mut b: usize, mut c: usize) -> u64 {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    choose3(c as u64) + choose2(b as u64) + a as u64
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Edges with length `<= eps_max`, in filtration order (length, then vertices).
fn sorted_edges<T: Scalar>(dist: &DistanceMatrix<T>, eps_max: T) -> Vec<Edge<T>> {
    let n = dist.len();
    let mut edges: Vec<Edge<T>> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .map(|(u, v)| Edge { diam: dist.get(u, v), u, v })
        .filter(|e| e.diam <= eps_max)
        .collect();
    edges.sort_by(|a, b| a.diam.total_cmp_finite(&b.diam).then(a.u.cmp(&b.u)).then(a.v.cmp(&b.v)));
    edges
}

/// Default filtration ceiling: the largest pairwise distance.
pub fn default_eps_max<T: Scalar>(dist: &DistanceMatrix<T>) -> T {
    dist.max_distance()
}

/// Persistence diagrams for degrees `0..=max_dim` (`max_dim <= 1`).
///
/// Zero-length pairs are kept in degree 0 (so finite pairs plus essential
/// classes always count the points) and dropped in degree 1. Degree-1 classes
/// still alive at `eps_max` are reported as essential.
pub fn rips_persistence<T: Scalar>(
    dist: &DistanceMatrix<T>,
    max_dim: usize,
    eps_max: T,
) -> Result<Vec<PersistenceDiagram<T>>> {
    if !(eps_max > T::zero()) || !eps_max.is_finite() {
        return Err(Error::Parameter(format!("eps_max must be positive and finite, got {eps_max}")));
    }
    if max_dim > 1 {
        return Err(Error::Parameter(format!("homology above degree 1 is not supported (max_dim={max_dim})")));
    }
    let n = dist.len();
    let edges = sorted_edges(dist, eps_max);

    let mut uf = UnionFind::new(n);
    let mut h0_pairs = Vec::with_capacity(n.saturating_sub(1));
    let mut killer = vec![false; edges.len()];
    for (idx, e) in edges.iter().enumerate() {
        if uf.union(e.u, e.v) {
            h0_pairs.push(PersistencePair::new(T::zero(), e.diam));
            killer[idx] = true;
        }
    }
    let components = n - h0_pairs.len();
    let mut diagrams = vec![PersistenceDiagram::new(0, h0_pairs, vec![T::zero(); components], eps_max)];

    if max_dim >= 1 {
        diagrams.push(degree_one(dist, &edges, &killer, eps_max));
    }
    Ok(diagrams)
}

/// Sorted coboundary of an edge: all triangles through it within the ceiling.
fn coboundary<T: Scalar>(dist: &DistanceMatrix<T>, e: &Edge<T>, eps_max: T, out: &mut Vec<Triangle<T>>) {
    out.clear();
    for w in 0..dist.len() {
        if w == e.u || w == e.v {
            continue;
        }
        let diam = e.diam.max(dist.get(e.u, w)).max(dist.get(e.v, w));
        if diam <= eps_max {
            out.push(Triangle { diam, key: triangle_key(e.u, e.v, w) });
        }
    }
    out.sort_by(Triangle::cmp);
}

/// Symmetric difference of two sorted columns.
fn add_column<T: Scalar>(acc: &[Triangle<T>], other: &[Triangle<T>], out: &mut Vec<Triangle<T>>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&other[j..]);
}

fn degree_one<T: Scalar>(
    dist: &DistanceMatrix<T>,
    edges: &[Edge<T>],
    killer: &[bool],
    eps_max: T,
) -> PersistenceDiagram<T> {
    let mut pairs = Vec::new();
    let mut essential = Vec::new();
    // pivot triangle key -> the edge column that owns it
    let mut pivot_owner: HashMap<u64, usize> = HashMap::new();
    // edge column -> edges whose coboundaries were summed into it
    let mut reduction: HashMap<usize, Vec<usize>> = HashMap::new();

    let mut column = Vec::new();
    let mut scratch = Vec::new();
    let mut merged = Vec::new();
    for idx in (0..edges.len()).rev() {
        if killer[idx] {
            continue;
        }
        coboundary(dist, &edges[idx], eps_max, &mut column);
        let mut summed = vec![idx];
        while let Some(pivot) = column.first() {
            let Some(&owner) = pivot_owner.get(&pivot.key) else { break };
            for &e in &reduction[&owner] {
                coboundary(dist, &edges[e], eps_max, &mut scratch);
                add_column(&column, &scratch, &mut merged);
                std::mem::swap(&mut column, &mut merged);
            }
            summed.extend_from_slice(&reduction[&owner]);
        }
        match column.first() {
            Some(pivot) => {
                pivot_owner.insert(pivot.key, idx);
                if pivot.diam > edges[idx].diam {
                    pairs.push(PersistencePair::new(edges[idx].diam, pivot.diam));
                }
                summed.sort_unstable();
                cancel_pairs(&mut summed);
                reduction.insert(idx, summed);
            }
            None => essential.push(edges[idx].diam),
        }
    }
    PersistenceDiagram::new(1, pairs, essential, eps_max)
}

/// Drop elements that occur an even number of times in a sorted vector.
fn cancel_pairs(v: &mut Vec<usize>) {
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    *v = out;
}

/// All simplices of dimension `<= max_dim` in the Rips complex at scale `eps`,
/// each as sorted vertex lists. Exponential in `max_dim`; meant for small inputs.
pub fn rips_simplices<T: Scalar>(dist: &DistanceMatrix<T>, eps: T, max_dim: usize) -> Vec<Vec<usize>> {
    fn extend<T: Scalar>(
        dist: &DistanceMatrix<T>,
        eps: T,
        max_dim: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(current.clone());
        if current.len() > max_dim {
            return;
        }
        let start = current.last().map_or(0, |&v| v + 1);
        for w in start..dist.len() {
            if current.iter().all(|&u| dist.get(u, w) <= eps) {
                current.push(w);
                extend(dist, eps, max_dim, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    for v in 0..dist.len() {
        extend(dist, eps, max_dim, &mut vec![v], &mut out);
    }
    out
}
