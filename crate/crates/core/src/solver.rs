//! Sparsity-constrained least squares.
//!
//! [`subspace_pursuit`] approximately solves
//! `argmin ‖A x − y‖₂ subject to ‖x‖₀ ≤ s` for any [`SensingOperator`]:
//! the Laplacian column submatrices used by the clustering pipeline and
//! plain dense matrices used in tests.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{self, Cholesky, DenseMatrix};
use crate::graph::VertexSet;
use crate::{Error, Result};

/// A linear map `R^ncols -> R^nrows` with column access.
///
/// Implementations must be read-only and reentrant.
pub trait SensingOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `out = A x`
    fn apply(&self, x: &[f64], out: &mut [f64]);

    /// `out = A^T r`
    fn apply_transpose(&self, r: &[f64], out: &mut [f64]);

    /// Replaces `out` with the `(row, value)` nonzeros of column `j`.
    fn column_entries(&self, j: usize, out: &mut Vec<(usize, f64)>);
}

impl SensingOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(x, out)
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        self.transpose_matvec(r, out)
    }

    fn column_entries(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        out.extend(
            self.col(j)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v)),
        );
    }
}

impl<T: SensingOperator + ?Sized> SensingOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }

    fn ncols(&self) -> usize {
        (**self).ncols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply(x, out)
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        (**self).apply_transpose(r, out)
    }

    fn column_entries(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        (**self).column_entries(j, out)
    }
}

/// `A` with column `j` multiplied by `scale[j]`.
#[derive(Debug, Clone)]
pub struct ScaledColumns<A> {
    inner: A,
    scale: Vec<f64>,
}

impl<A: SensingOperator> ScaledColumns<A> {
    /// Scales every nonzero column to unit Euclidean norm.
    pub fn unit_norm(inner: A) -> Self {
        let mut buf = Vec::new();
        let scale = (0..inner.ncols())
            .map(|j| {
                inner.column_entries(j, &mut buf);
                let nrm = libm::sqrt(buf.iter().map(|&(_, v)| v * v).sum::<f64>());
                if nrm > 0.0 {
                    1.0 / nrm
                } else {
                    1.0
                }
            })
            .collect();
        Self { inner, scale }
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

impl<A: SensingOperator> SensingOperator for ScaledColumns<A> {
    fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let xs: Vec<f64> = x.iter().zip(&self.scale).map(|(a, b)| a * b).collect();
        self.inner.apply(&xs, out)
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        self.inner.apply_transpose(r, out);
        out.iter_mut().zip(&self.scale).for_each(|(o, s)| *o *= s);
    }

    fn column_entries(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        self.inner.column_entries(j, out);
        let s = self.scale[j];
        out.iter_mut().for_each(|e| e.1 *= s);
    }
}

/// Indices of the `s` entries of largest magnitude; ties go to the smaller
/// index. `s >= v.len()` selects everything.
pub fn top_k_magnitude(v: &[f64], s: usize) -> VertexSet {
    let n = v.len();
    if s >= n {
        return VertexSet::full(n);
    }
    if s == 0 {
        return VertexSet::new();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.select_nth_unstable_by(s - 1, |&a, &b| {
        libm::fabs(v[b])
            .total_cmp(&libm::fabs(v[a]))
            .then(a.cmp(&b))
    });
    idx.truncate(s);
    VertexSet::from_unsorted(idx)
}

/// Columns of `support` at most this wide always go through pivoted QR.
const QR_MAX_COLS: usize = 64;
/// Relative pivot floor below which the normal equations are abandoned.
const CHOLESKY_REL_TOL: f64 = 1e-10;

/// Minimizer of `‖A_S z − y‖₂` over `z`, one entry per member of `support`
/// (in increasing index order). Rank-deficient `A_S` yields the minimum-norm
/// minimizer.
pub fn restricted_least_squares<A: SensingOperator + ?Sized>(
    a: &A,
    support: &VertexSet,
    y: &[f64],
) -> Result<Vec<f64>> {
    if support.is_empty() {
        return Err(Error::Empty("support"));
    }
    check_dims(a, y)?;
    support.check_range(a.ncols())?;
    Ok(ColumnBlock::gather(a, support).solve(y))
}

fn check_dims<A: SensingOperator + ?Sized>(a: &A, y: &[f64]) -> Result<()> {
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Selected columns in sparse form, with the touched rows compacted.
struct ColumnBlock {
    /// compact row -> original row
    rows: Vec<usize>,
    /// per column, `(compact row, value)`
    cols: Vec<Vec<(usize, f64)>>,
}

impl ColumnBlock {
    fn gather<A: SensingOperator + ?Sized>(a: &A, support: &VertexSet) -> Self {
        let m = a.nrows();
        let mut compact = vec![usize::MAX; m];
        let mut rows = Vec::new();
        let mut buf = Vec::new();
        let mut cols = Vec::with_capacity(support.len());
        for j in support.iter() {
            a.column_entries(j, &mut buf);
            let col = buf
                .iter()
                .map(|&(i, v)| {
                    if compact[i] == usize::MAX {
                        compact[i] = rows.len();
                        rows.push(i);
                    }
                    (compact[i], v)
                })
                .collect();
            cols.push(col);
        }
        Self { rows, cols }
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (col, &zk) in self.cols.iter().zip(z) {
            for &(i, v) in col {
                out[i] += v * zk;
            }
        }
    }

    fn apply_transpose(&self, r: &[f64], out: &mut [f64]) {
        for (o, col) in out.iter_mut().zip(&self.cols) {
            *o = col.iter().map(|&(i, v)| v * r[i]).sum();
        }
    }

    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = self.rows.iter().map(|&i| y[i]).collect();
        let p = self.cols.len();
        if p > QR_MAX_COLS {
            if let Some(z) = self.solve_normal(&rhs) {
                return z;
            }
        }
        self.solve_qr(&rhs)
    }

    fn solve_qr(&self, rhs: &[f64]) -> Vec<f64> {
        let mr = self.rows.len();
        let mut block = DenseMatrix::zeros(mr, self.cols.len());
        for (k, col) in self.cols.iter().enumerate() {
            let dst = block.col_mut(k);
            for &(i, v) in col {
                dst[i] = v;
            }
        }
        dense::least_squares_min_norm(block, rhs)
    }

    /// Normal equations with one step of iterative refinement. `None` when
    /// the Gram matrix is numerically singular.
    fn solve_normal(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let p = self.cols.len();
        let mr = self.rows.len();
        // row-wise view for assembling A^T A
        let mut row_ptr = vec![0usize; mr + 1];
        for col in &self.cols {
            for &(i, _) in col {
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..mr {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut fill = row_ptr.clone();
        let mut entries = vec![(0usize, 0.0f64); row_ptr[mr]];
        for (k, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                entries[fill[i]] = (k, v);
                fill[i] += 1;
            }
        }
        let mut g = DenseMatrix::zeros(p, p);
        for i in 0..mr {
            let row = &entries[row_ptr[i]..row_ptr[i + 1]];
            for (a, &(ka, va)) in row.iter().enumerate() {
                for &(kb, vb) in &row[a..] {
                    // lower triangle only; columns arrive in increasing k
                    let (hi, lo) = if ka >= kb { (ka, kb) } else { (kb, ka) };
                    g[(hi, lo)] += va * vb;
                }
            }
        }
        let chol = Cholesky::factor(g, CHOLESKY_REL_TOL)?;

        let mut z = vec![0.0; p];
        self.apply_transpose(rhs, &mut z);
        chol.solve_in_place(&mut z);

        let mut r = vec![0.0; mr];
        self.apply(&z, &mut r);
        r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
        let mut dz = vec![0.0; p];
        self.apply_transpose(&r, &mut dz);
        chol.solve_in_place(&mut dz);
        z.iter_mut().zip(&dz).for_each(|(zi, di)| *zi += di);
        Some(z)
    }
}

/// Least-squares fit of `y` on a fixed support.
#[derive(Debug, Clone)]
struct Fit {
    coef: Vec<f64>,
    resid: Vec<f64>,
    norm: f64,
}

fn project<A: SensingOperator + ?Sized>(a: &A, support: &VertexSet, y: &[f64]) -> Fit {
    let block = ColumnBlock::gather(a, support);
    let coef = block.solve(y);
    let mut fitted = vec![0.0; block.rows.len()];
    block.apply(&coef, &mut fitted);
    let mut resid = y.to_vec();
    for (k, &i) in block.rows.iter().enumerate() {
        resid[i] -= fitted[k];
    }
    let norm = dense::norm2(&resid);
    Fit { coef, resid, norm }
}

/// Subspace Pursuit configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpConfig {
    /// Iteration budget, counting the initial support estimate as
    /// iteration 1. `None` means `max(1, ⌈log₂ ncols⌉)`.
    pub max_iter: Option<usize>,
    /// Stop once the residual norm is at or below this value.
    pub tol: f64,
    /// Run on unit-norm columns and rescale the coefficients afterwards.
    pub normalize_columns: bool,
}

impl Default for SpConfig {
    fn default() -> Self {
        Self {
            max_iter: None,
            tol: 1e-8,
            normalize_columns: false,
        }
    }
}

/// `max(1, ⌈log₂ n⌉)`
pub fn default_iterations(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpResult {
    /// Dense coefficient vector, one entry per operator column.
    pub solution: Vec<f64>,
    /// Local column indices carrying the solution.
    pub support: VertexSet,
    /// Residual norm of every accepted iterate, the initial one first.
    pub residual_history: Vec<f64>,
    /// Iterations performed, including the initial estimate and a final
    /// rejected one if the residual went up.
    pub iterations: usize,
    /// Residual reached `tol` or the support stopped changing.
    pub converged: bool,
}

impl SpResult {
    pub fn residual(&self) -> f64 {
        *self.residual_history.last().expect("at least one iterate")
    }
}

/// Subspace Pursuit for `argmin ‖A x − y‖₂ s.t. ‖x‖₀ ≤ s`.
///
/// Starts from the `s` columns most correlated with `y`; each round merges
/// in the `s` columns most correlated with the current residual, solves
/// least squares on the merged set, keeps the `s` largest coefficients and
/// re-projects. A round whose residual exceeds the previous one is
/// discarded and the previous iterate returned.
pub fn subspace_pursuit<A: SensingOperator + ?Sized>(
    a: &A,
    y: &[f64],
    s: usize,
    cfg: &SpConfig,
) -> Result<SpResult> {
    if cfg.normalize_columns {
        let scaled = ScaledColumns::unit_norm(a);
        let mut res = pursue(&scaled, y, s, cfg)?;
        res.solution
            .iter_mut()
            .zip(scaled.scale())
            .for_each(|(x, sc)| *x *= sc);
        return Ok(res);
    }
    pursue(a, y, s, cfg)
}

fn pursue<A: SensingOperator + ?Sized>(
    a: &A,
    y: &[f64],
    s: usize,
    cfg: &SpConfig,
) -> Result<SpResult> {
    check_dims(a, y)?;
    let n = a.ncols();
    if n == 0 {
        return Err(Error::Empty("sensing operator columns"));
    }
    if s == 0 {
        return Err(Error::InvalidParameter(format!(
            "sparsity must be >= 1, got {s}"
        )));
    }
    let max_iter = cfg.max_iter.unwrap_or_else(|| default_iterations(n));
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
    }
    let s = s.min(n);

    let mut corr = vec![0.0; n];
    a.apply_transpose(y, &mut corr);
    let mut support = top_k_magnitude(&corr, s);
    let mut fit = project(a, &support, y);
    let mut history = vec![fit.norm];
    let mut iterations = 1;
    let mut converged = fit.norm <= cfg.tol;

    while !converged && iterations < max_iter {
        iterations += 1;
        a.apply_transpose(&fit.resid, &mut corr);
        let candidate = support.union(&top_k_magnitude(&corr, s));
        let z = ColumnBlock::gather(a, &candidate).solve(y);
        let keep = top_k_magnitude(&z, s);
        let next = VertexSet::from_sorted(keep.iter().map(|k| candidate.as_slice()[k]).collect());
        if next == support {
            converged = true;
            break;
        }
        let next_fit = project(a, &next, y);
        if next_fit.norm > fit.norm {
            break;
        }
        support = next;
        fit = next_fit;
        history.push(fit.norm);
        converged = fit.norm <= cfg.tol;
    }

    let mut solution = vec![0.0; n];
    for (k, j) in support.iter().enumerate() {
        solution[j] = fit.coef[k];
    }
    Ok(SpResult {
        solution,
        support,
        residual_history: history,
        iterations,
        converged,
    })
}

/// Largest matrix width accepted by [`rip_constant_bruteforce`].
pub const RIP_MAX_COLUMNS: usize = 20;

/// Restricted isometry constant `δ_s` by enumerating every `s`-column
/// submatrix: `δ_s = max_S max(1 − σ_min(A_S)², σ_max(A_S)² − 1)`.
pub fn rip_constant_bruteforce(a: &DenseMatrix, s: usize) -> Result<f64> {
    let n = a.cols();
    if n > RIP_MAX_COLUMNS {
        return Err(Error::TooLarge {
            n,
            cap: RIP_MAX_COLUMNS,
        });
    }
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sparsity must be in 1..={n}, got {s}"
        )));
    }
    let mut delta: f64 = 0.0;
    let mut combo: Vec<usize> = (0..s).collect();
    loop {
        let ev = dense::symmetric_eigenvalues(&a.select_columns(&combo).gram());
        let lo = ev[0];
        let hi = ev[s - 1];
        delta = delta.max(1.0 - lo).max(hi - 1.0);

        // next combination in lexicographic order
        let mut i = s;
        while i > 0 && combo[i - 1] == n - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(delta);
        }
        combo[i - 1] += 1;
        for k in i..s {
            combo[k] = combo[k - 1] + 1;
        }
    }
}
