//! Sparse undirected weighted graphs and sorted vertex sets.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A sorted set of distinct vertex indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds a set from arbitrary indices, sorting and removing duplicates.
    pub fn from_unsorted<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    /// Wraps an already strictly increasing vector.
    ///
    /// Panics in debug builds if the input is not strictly increasing.
    pub fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    /// `{0, 1, ..., n-1}`
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Vertices `i` with `mask[i]` set.
    pub fn from_mask(mask: &[bool]) -> Self {
        Self(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn iter(&self) -> core::iter::Copied<core::slice::Iter<'_, usize>> {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` inside the set, i.e. its local index.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Fails unless every member is below `n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.max() {
            Some(m) if m >= n => Err(Error::IndexOutOfRange { index: m, n }),
            _ => Ok(()),
        }
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for i in self.iter() {
            mask[i] = true;
        }
        mask
    }

    /// Dense 0/1 indicator vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for i in self.iter() {
            v[i] = 1.0;
        }
        v
    }

    /// `{0..n} \ self`
    pub fn complement(&self, n: usize) -> Self {
        let mut out = Vec::with_capacity(n.saturating_sub(self.len()));
        let mut it = self.0.iter().peekable();
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// `|self △ other|`
    pub fn symmetric_difference_len(&self, other: &Self) -> usize {
        self.len() + other.len() - 2 * self.intersection_len(other)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.len() <= other.len() && self.intersection_len(other) == self.len()
    }

    /// Image of the set under a vertex relabeling `v -> perm[v]`.
    pub fn map(&self, perm: &[usize]) -> Self {
        Self::from_unsorted(self.iter().map(|v| perm[v]))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_unsorted(iter)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = core::iter::Copied<core::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Immutable undirected weighted graph stored as a symmetric CSR matrix.
///
/// Because the adjacency matrix is symmetric the row of vertex `i` doubles as
/// its column, so both access patterns share one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
}

impl SparseGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored nonzeros in `A` (each undirected edge counts twice,
    /// a self-loop once).
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n)
            .filter(|&i| self.neighbors(i).any(|(j, _)| j == i))
            .count();
        (self.nnz() - loops) / 2 + loops
    }

    /// Weighted degrees `d_i = sum_j A_ij`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    /// `(j, A_ij)` for every stored entry of row `i`, in increasing `j`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn row_indices(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_weights(&self, i: usize) -> &[f64] {
        &self.weights[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// `A_ij`, zero when no edge is stored.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let cols = self.row_indices(i);
        match cols.binary_search(&j) {
            Ok(pos) => self.row_weights(i)[pos],
            Err(_) => 0.0,
        }
    }

    /// Every undirected edge once, as `(i, j, w)` with `i <= j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| j >= i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    /// `out = A x`
    pub fn adjacency_matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.neighbors(i).map(|(j, w)| w * x[j]).sum();
        }
    }

    /// Subgraph induced by `keep`, relabeled so that `keep[k]` becomes `k`.
    ///
    /// Fails with [`Error::IsolatedVertex`] (local index) when a kept vertex
    /// loses all of its edges.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> Result<SparseGraph> {
        keep.check_range(self.n)?;
        let mut local = vec![usize::MAX; self.n];
        for (k, v) in keep.iter().enumerate() {
            local[v] = k;
        }
        let mut edges = Vec::new();
        let mut has_loop = false;
        for (k, v) in keep.iter().enumerate() {
            for (u, w) in self.neighbors(v) {
                let lu = local[u];
                if lu != usize::MAX && lu >= k {
                    has_loop |= lu == k;
                    edges.push((k, lu, w));
                }
            }
        }
        GraphBuilder::new(keep.len())
            .allow_self_loops(has_loop)
            .extend(edges)
            .build()
    }

    /// Relabels vertices with `v -> perm[v]`. `perm` must be a permutation.
    pub fn permute(&self, perm: &[usize]) -> Result<SparseGraph> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        let has_loop = self.edges().any(|(i, j, _)| i == j);
        GraphBuilder::new(self.n)
            .allow_self_loops(has_loop)
            .extend(self.edges().map(|(i, j, w)| (perm[i], perm[j], w)))
            .build()
    }

    /// Connected components as vertex sets, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[start] = id;
            stack.push(start);
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for &u in self.row_indices(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        stack.push(u);
                    }
                }
            }
            out.push(VertexSet::from_unsorted(members));
        }
        out
    }
}

/// Accumulates weighted edges and assembles a [`SparseGraph`].
///
/// Both orientations of an edge are merged and duplicates are summed, so
/// `(0, 1, 1.0)` followed by `(1, 0, 1.0)` yields a single edge of weight 2.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    allow_self_loops: bool,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            allow_self_loops: false,
            edges: Vec::new(),
        }
    }

    pub fn allow_self_loops(mut self, allow: bool) -> Self {
        self.allow_self_loops = allow;
        self
    }

    pub fn edge(mut self, i: usize, j: usize, w: f64) -> Self {
        self.edges.push((i, j, w));
        self
    }

    pub fn push(&mut self, i: usize, j: usize, w: f64) {
        self.edges.push((i, j, w));
    }

    pub fn extend<I: IntoIterator<Item = (usize, usize, f64)>>(mut self, edges: I) -> Self {
        self.edges.extend(edges);
        self
    }

    pub fn build(self) -> Result<SparseGraph> {
        let n = self.n;
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * self.edges.len());
        for &(i, j, w) in &self.edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            if i == j {
                if !self.allow_self_loops {
                    return Err(Error::SelfLoop(i));
                }
                entries.push((i, i, w));
            } else {
                entries.push((i, j, w));
                entries.push((j, i, w));
            }
        }
        entries.sort_unstable_by_key(|a| (a.0, a.1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut weights: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, w) in entries {
            if last == Some((i, j)) {
                *weights.last_mut().expect("merged entry") += w;
            } else {
                col_idx.push(j);
                weights.push(w);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }

        let mut degrees = vec![0.0; n];
        for (i, d) in degrees.iter_mut().enumerate() {
            *d = weights[row_ptr[i]..row_ptr[i + 1]].iter().sum();
            if *d <= 0.0 {
                return Err(Error::IsolatedVertex(i));
            }
        }

        Ok(SparseGraph {
            n,
            row_ptr,
            col_idx,
            weights,
            degrees,
        })
    }
}

/// Builds a graph from `(i, j, weight)` triples with the default policy:
/// no self-loops, duplicates summed, isolated vertices rejected.
pub fn build_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<SparseGraph> {
    GraphBuilder::new(n).extend(edges.iter().copied()).build()
}
