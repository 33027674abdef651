//! The random-walk Laplacian `L = I - D^{-1} A` as a matrix-free operator.
//!
//! Entries are `L_ij = δ_ij - A_ij / d_i`. Row `i` of `L` is row `i` of `A`
//! scaled by `-1/d_i`, and since `A` is symmetric column `j` of `L` is read
//! off the adjacency list of `j` with each entry scaled by its *row* degree.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::graph::{SparseGraph, VertexSet};
use crate::solver::SensingOperator;
use crate::{Error, Result};

/// Largest `n` for which [`LaplacianOperator::to_dense`] will materialize `L`.
pub const DEFAULT_DENSE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy)]
pub struct LaplacianOperator<'g> {
    graph: &'g SparseGraph,
}

pub fn random_walk_laplacian(g: &SparseGraph) -> LaplacianOperator<'_> {
    LaplacianOperator { graph: g }
}

impl<'g> LaplacianOperator<'g> {
    pub fn graph(&self) -> &'g SparseGraph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `L_ii`; exactly 1 unless vertex `i` carries a self-loop.
    pub fn diagonal(&self, i: usize) -> f64 {
        1.0 - self.graph.weight(i, i) / self.graph.degree(i)
    }

    /// `L_ij`
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - self.graph.weight(i, j) / self.graph.degree(i)
    }

    /// `out = L x`
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        for i in 0..g.n() {
            let ax: f64 = g.neighbors(i).map(|(j, w)| w * x[j]).sum();
            out[i] = x[i] - ax / g.degree(i);
        }
    }

    /// `out = L^T x`
    pub fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        let scaled: Vec<f64> = (0..g.n()).map(|i| x[i] / g.degree(i)).collect();
        for j in 0..g.n() {
            let s: f64 = g.neighbors(j).map(|(i, w)| w * scaled[i]).sum();
            out[j] = x[j] - s;
        }
    }

    /// `out = |L| x` with the absolute value taken entrywise on `L`.
    pub fn apply_abs(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        for i in 0..g.n() {
            let d = g.degree(i);
            let mut acc = 0.0;
            for (j, w) in g.neighbors(i) {
                if j != i {
                    acc += w * x[j];
                }
            }
            out[i] = libm::fabs(self.diagonal(i)) * x[i] + acc / d;
        }
    }

    /// `out = |L|^T x`
    pub fn apply_abs_transpose(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        let scaled: Vec<f64> = (0..g.n()).map(|i| x[i] / g.degree(i)).collect();
        for j in 0..g.n() {
            let mut acc = 0.0;
            for (i, w) in g.neighbors(j) {
                if i != j {
                    acc += w * scaled[i];
                }
            }
            out[j] = libm::fabs(self.diagonal(j)) * x[j] + acc;
        }
    }

    /// Calls `f(i, L_ij)` for every structural nonzero of column `j`.
    pub fn for_each_in_column<F: FnMut(usize, f64)>(&self, j: usize, mut f: F) {
        let g = self.graph;
        let mut diag_seen = false;
        for (i, w) in g.neighbors(j) {
            if i == j {
                diag_seen = true;
                f(j, 1.0 - w / g.degree(j));
            } else {
                if !diag_seen && i > j {
                    diag_seen = true;
                    f(j, 1.0);
                }
                f(i, -w / g.degree(i));
            }
        }
        if !diag_seen {
            f(j, 1.0);
        }
    }

    /// `L 1_s`. Equals `-L 1_{V\s}` because `L 1 = 0`.
    pub fn indicator_image(&self, s: &VertexSet) -> Vec<f64> {
        let g = self.graph;
        let n = g.n();
        let mask = s.to_mask(n);
        (0..n)
            .map(|i| {
                let a: f64 = g
                    .neighbors(i)
                    .filter(|&(j, _)| mask[j])
                    .map(|(_, w)| w)
                    .sum();
                let own = if mask[i] { 1.0 } else { 0.0 };
                own - a / g.degree(i)
            })
            .collect()
    }

    /// `L 1_{V\t}` computed as `-L 1_t`, touching only the neighborhood of `t`.
    pub fn complement_indicator_image(&self, t: &VertexSet) -> Vec<f64> {
        let g = self.graph;
        let mut y = vec![0.0; g.n()];
        for j in t.iter() {
            self.for_each_in_column(j, |i, v| y[i] -= v);
        }
        y
    }

    pub fn column_submatrix(&self, s: VertexSet) -> Result<ColumnSubmatrix<'g>> {
        ColumnSubmatrix::new(*self, s)
    }

    /// Dense `L`, refused above [`DEFAULT_DENSE_CAP`] vertices.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.n();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        let mut m = DenseMatrix::zeros(n, n);
        for j in 0..n {
            self.for_each_in_column(j, |i, v| m[(i, j)] = v);
        }
        Ok(m)
    }
}

impl SensingOperator for LaplacianOperator<'_> {
    fn nrows(&self) -> usize {
        self.n()
    }

    fn ncols(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        LaplacianOperator::apply(self, x, out)
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        LaplacianOperator::apply_transpose(self, r, out)
    }

    fn column_entries(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        self.for_each_in_column(j, |i, v| out.push((i, v)));
    }
}

/// `L_S`: the columns of `L` indexed by `S`, with local column `k`
/// corresponding to global vertex `S[k]`.
#[derive(Debug, Clone)]
pub struct ColumnSubmatrix<'g> {
    parent: LaplacianOperator<'g>,
    selected: VertexSet,
    local_of: Vec<usize>,
}

impl<'g> ColumnSubmatrix<'g> {
    pub fn new(parent: LaplacianOperator<'g>, selected: VertexSet) -> Result<Self> {
        if selected.is_empty() {
            return Err(Error::Empty("column selection"));
        }
        selected.check_range(parent.n())?;
        let mut local_of = vec![usize::MAX; parent.n()];
        for (k, v) in selected.iter().enumerate() {
            local_of[v] = k;
        }
        Ok(Self {
            parent,
            selected,
            local_of,
        })
    }

    pub fn parent(&self) -> LaplacianOperator<'g> {
        self.parent
    }

    pub fn selected(&self) -> &VertexSet {
        &self.selected
    }

    pub fn global_index(&self, local: usize) -> usize {
        self.selected.as_slice()[local]
    }

    pub fn local_index(&self, global: usize) -> Option<usize> {
        match self.local_of.get(global) {
            Some(&k) if k != usize::MAX => Some(k),
            _ => None,
        }
    }

    /// Scatters a local-indexed vector into a length-`n` global vector.
    pub fn embed(&self, local: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.parent.n()];
        for (k, v) in self.selected.iter().enumerate() {
            out[v] = local[k];
        }
        out
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let n = self.parent.n();
        if n > DEFAULT_DENSE_CAP {
            return Err(Error::TooLarge {
                n,
                cap: DEFAULT_DENSE_CAP,
            });
        }
        let mut m = DenseMatrix::zeros(n, self.selected.len());
        for (k, j) in self.selected.iter().enumerate() {
            self.parent.for_each_in_column(j, |i, v| m[(i, k)] = v);
        }
        Ok(m)
    }
}

impl SensingOperator for ColumnSubmatrix<'_> {
    fn nrows(&self) -> usize {
        self.parent.n()
    }

    fn ncols(&self) -> usize {
        self.selected.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, j) in self.selected.iter().enumerate() {
            let xk = x[k];
            if xk != 0.0 {
                self.parent.for_each_in_column(j, |i, v| out[i] += v * xk);
            }
        }
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        let g = self.parent.graph();
        for (k, j) in self.selected.iter().enumerate() {
            // column j: diagonal term plus -A_ij / d_i over neighbors i
            let mut acc = 0.0;
            let mut diag = 1.0;
            for (i, w) in g.neighbors(j) {
                if i == j {
                    diag -= w / g.degree(j);
                } else {
                    acc -= w * r[i] / g.degree(i);
                }
            }
            out[k] = acc + diag * r[j];
        }
    }

    fn column_entries(&self, k: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let j = self.global_index(k);
        self.parent.for_each_in_column(j, |i, v| out.push((i, v)));
    }
}
