//! Small dense linear algebra: column-major storage, Householder QR with
//! column pivoting, minimum-norm least squares, Cholesky and Jacobi
//! eigenvalues for symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// From a column-major buffer.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer size");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Copy of the columns listed in `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for (k, &j) in cols.iter().enumerate() {
            out.col_mut(k).copy_from_slice(self.col(j));
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `out = self * x`
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &xj) in x.iter().enumerate().take(self.cols) {
            if xj != 0.0 {
                axpy(xj, self.col(j), out);
            }
        }
    }

    /// `out = self^T * x`
    pub fn transpose_matvec(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.cols) {
            *o = dot(self.col(j), x);
        }
    }

    /// `self^T * self`
    pub fn gram(&self) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for a in 0..p {
            for b in a..p {
                let v = dot(self.col(a), self.col(b));
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// Householder QR `A P = Q R`, stored LAPACK-style: `R` in the upper triangle,
/// reflector tails below the diagonal, scalars in `tau`.
struct Qr {
    a: DenseMatrix,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

impl Qr {
    fn factor(mut a: DenseMatrix, pivot: bool) -> Self {
        let (m, n) = (a.rows, a.cols);
        let kmax = m.min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut tau = vec![0.0; kmax];
        let mut norms: Vec<f64> = (0..n).map(|j| dot(a.col(j), a.col(j))).collect();
        let mut norms_ref = norms.clone();

        for k in 0..kmax {
            if pivot {
                let mut best = k;
                for j in k + 1..n {
                    if norms[j] > norms[best] {
                        best = j;
                    }
                }
                if best != k {
                    for i in 0..m {
                        a.data.swap(k * m + i, best * m + i);
                    }
                    perm.swap(k, best);
                    norms.swap(k, best);
                    norms_ref.swap(k, best);
                }
            }

            // reflector annihilating a[k+1.., k]
            let (head, tail) = a.data.split_at_mut((k + 1) * m);
            let colk = &mut head[k * m..];
            let alpha = colk[k];
            let xnorm = norm2(&colk[k + 1..]);
            if xnorm == 0.0 {
                tau[k] = 0.0;
            } else {
                let beta = -libm::copysign(libm::hypot(alpha, xnorm), alpha);
                tau[k] = (beta - alpha) / beta;
                let scale = 1.0 / (alpha - beta);
                colk[k + 1..].iter_mut().for_each(|v| *v *= scale);
                colk[k] = beta;
            }

            let t = tau[k];
            let v = &colk[k + 1..];
            for (jj, colj) in tail.chunks_exact_mut(m).enumerate() {
                if t != 0.0 {
                    let w = colj[k] + dot(v, &colj[k + 1..]);
                    let tw = t * w;
                    colj[k] -= tw;
                    axpy(-tw, v, &mut colj[k + 1..]);
                }
                if pivot {
                    let j = k + 1 + jj;
                    let rkj = colj[k];
                    norms[j] -= rkj * rkj;
                    if norms[j] <= 1e-6 * norms_ref[j] {
                        norms[j] = dot(&colj[k + 1..], &colj[k + 1..]);
                        norms_ref[j] = norms[j];
                    }
                }
            }
        }
        Qr { a, tau, perm }
    }

    /// `b <- Q^T b`
    fn apply_qt(&self, b: &mut [f64]) {
        let m = self.a.rows;
        for (k, &t) in self.tau.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let v = &self.a.col(k)[k + 1..];
            let w = b[k] + dot(v, &b[k + 1..m]);
            b[k] -= t * w;
            axpy(-t * w, v, &mut b[k + 1..m]);
        }
    }

    /// `b <- Q b`
    fn apply_q(&self, b: &mut [f64]) {
        let m = self.a.rows;
        for (k, &t) in self.tau.iter().enumerate().rev() {
            if t == 0.0 {
                continue;
            }
            let v = &self.a.col(k)[k + 1..];
            let w = b[k] + dot(v, &b[k + 1..m]);
            b[k] -= t * w;
            axpy(-t * w, v, &mut b[k + 1..m]);
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        self.a[(i, j)]
    }

    /// Numerical rank from the pivoted diagonal of `R`.
    fn rank(&self) -> usize {
        let kmax = self.tau.len();
        if kmax == 0 {
            return 0;
        }
        let r00 = libm::fabs(self.r(0, 0));
        if r00 == 0.0 {
            return 0;
        }
        let tol = r00 * (self.a.rows.max(self.a.cols) as f64) * f64::EPSILON;
        (0..kmax)
            .take_while(|&k| libm::fabs(self.r(k, k)) > tol)
            .count()
    }
}

/// Minimum-norm solution of `min ‖A x − b‖₂`.
///
/// Full column rank goes through pivoted QR and back substitution. For rank
/// `r < n` the leading `r` rows `[R11 R12]` are factored again from the
/// right (a complete orthogonal decomposition) so the returned `x` has the
/// smallest norm among all least-squares minimizers.
pub fn least_squares_min_norm(a: DenseMatrix, b: &[f64]) -> Vec<f64> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m, "rhs length");
    if n == 0 {
        return Vec::new();
    }
    let qr = Qr::factor(a, true);
    let mut c = b.to_vec();
    qr.apply_qt(&mut c);
    let r = qr.rank();
    let mut x = vec![0.0; n];
    if r == 0 {
        return x;
    }

    let z = if r == n {
        let mut z = c[..n].to_vec();
        back_substitute(|i, j| qr.r(i, j), &mut z);
        z
    } else {
        // R1 = [R11 R12] is r x n. Factor R1^T = Q2 R2, then the min-norm
        // solution of R1 z = c is z = Q2 (R2^{-T} c).
        let mut r1t = DenseMatrix::zeros(n, r);
        for i in 0..r {
            for j in i..n {
                r1t[(j, i)] = qr.r(i, j);
            }
        }
        let qr2 = Qr::factor(r1t, false);
        let mut w = c[..r].to_vec();
        // forward substitution with R2^T (lower triangular)
        for i in 0..r {
            let s = w[..i]
                .iter()
                .enumerate()
                .fold(w[i], |s, (k, &wk)| s - qr2.r(k, i) * wk);
            w[i] = s / qr2.r(i, i);
        }
        let mut z = vec![0.0; n];
        z[..r].copy_from_slice(&w);
        qr2.apply_q(&mut z);
        z
    };
    for (k, &p) in qr.perm.iter().enumerate() {
        x[p] = z[k];
    }
    x
}

fn back_substitute<F: Fn(usize, usize) -> f64>(r: F, z: &mut [f64]) {
    let n = z.len();
    for i in (0..n).rev() {
        let s = z[i + 1..]
            .iter()
            .enumerate()
            .fold(z[i], |s, (j, &zj)| s - r(i, i + 1 + j) * zj);
        z[i] = s / r(i, i);
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix, stored in
/// the lower triangle (the upper triangle is left untouched).
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Factors `g`, returning `None` when some pivot falls below
    /// `rel_tol * g_kk`, i.e. when the columns behind the Gram matrix are
    /// numerically dependent.
    pub fn factor(mut g: DenseMatrix, rel_tol: f64) -> Option<Self> {
        let n = g.rows;
        assert_eq!(n, g.cols, "square");
        let diag0: Vec<f64> = (0..n).map(|k| g[(k, k)]).collect();
        for k in 0..n {
            // left-looking: column k -= sum_{j<k} L[k, j] * L[k.., j]
            for j in 0..k {
                let lkj = g[(k, j)];
                if lkj != 0.0 {
                    let (left, right) = g.data.split_at_mut(k * n);
                    let src = &left[j * n + k..j * n + n];
                    axpy(-lkj, src, &mut right[k..n]);
                }
            }
            let d = g[(k, k)];
            if d.is_nan() || d <= rel_tol * diag0[k] || d <= 0.0 {
                return None;
            }
            let s = libm::sqrt(d);
            g.col_mut(k)[k..].iter_mut().for_each(|v| *v /= s);
        }
        Some(Self { l: g })
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.rows;
        for j in 0..n {
            b[j] /= self.l[(j, j)];
            let bj = b[j];
            let col = &self.l.col(j)[j + 1..];
            axpy(-bj, col, &mut b[j + 1..]);
        }
        for j in (0..n).rev() {
            let col = &self.l.col(j)[j + 1..];
            b[j] = (b[j] - dot(col, &b[j + 1..])) / self.l[(j, j)];
        }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows;
    assert_eq!(n, a.cols, "square");
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut total = 0.0;
        for j in 0..n {
            for i in 0..n {
                let v = m[(i, j)] * m[(i, j)];
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta)
                    / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
