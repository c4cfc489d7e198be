//! Dense column-major matrices and a Householder QR that drops
//! numerically dependent columns in the order they appear.

use alloc::vec;
use alloc::vec::Vec;

use crate::stats::sqrt;

/// Relative tolerance below which a column counts as linearly dependent on
/// the columns kept before it.
pub const RANK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            m.col_mut(j).copy_from_slice(c);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            m.col_mut(dst).copy_from_slice(self.col(src));
        }
        m
    }

    /// X·β.
    pub fn mul_vec(&self, beta: &[f64]) -> Vec<f64> {
        assert_eq!(beta.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &b) in beta.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.col(j)) {
                *o += x * b;
            }
        }
        out
    }

    /// Xᵀ·v.
    pub fn tmul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| self.col(j).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Each row scaled by the matching factor.
    pub fn scale_rows(&self, factors: &[f64]) -> Matrix {
        let mut m = self.clone();
        for j in 0..self.cols {
            for (x, f) in m.col_mut(j).iter_mut().zip(factors) {
                *x *= f;
            }
        }
        m
    }
}

fn norm(v: &[f64]) -> f64 {
    // scaled to avoid overflow on large entries
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * sqrt(s)
}

/// QR factorization of the retained columns of X.
#[derive(Debug, Clone)]
pub struct Qr {
    n: usize,
    /// Original column indices kept, in order.
    pub kept: Vec<usize>,
    /// Original column indices dropped as dependent.
    pub dropped: Vec<usize>,
    /// Columns dropped only because the rank already equalled the row count.
    pub exhausted: usize,
    /// Householder vectors (full length n, zeros above the pivot row).
    reflectors: Vec<(Vec<f64>, f64)>,
    /// Upper-triangular R, rank × rank, column-major.
    r: Vec<f64>,
}

impl Qr {
    pub fn new(x: &Matrix) -> Qr {
        Self::with_tolerance(x, RANK_TOL)
    }

    pub fn with_tolerance(x: &Matrix, tol: f64) -> Qr {
        let n = x.rows();
        let k = x.cols();
        let mut work = x.clone();
        let orig_norms: Vec<f64> = (0..k).map(|j| norm(x.col(j))).collect();
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        let mut exhausted = 0;
        let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut r_cols: Vec<Vec<f64>> = Vec::new();

        for j in 0..k {
            let rank = kept.len();
            let tail_norm = if rank < n { norm(&work.col(j)[rank..]) } else { 0.0 };
            if rank >= n && orig_norms[j] > 0.0 {
                exhausted += 1;
                dropped.push(j);
                continue;
            }
            if orig_norms[j] == 0.0 || tail_norm <= tol * orig_norms[j] {
                dropped.push(j);
                continue;
            }
            // reflector mapping work[rank.., j] onto alpha·e1
            let col = work.col(j);
            let alpha = if col[rank] > 0.0 { -tail_norm } else { tail_norm };
            let mut v = vec![0.0; n];
            v[rank..].copy_from_slice(&col[rank..]);
            v[rank] -= alpha;
            let vnorm2: f64 = v[rank..].iter().map(|a| a * a).sum();
            let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            for jj in j..k {
                let c = work.col_mut(jj);
                let dot: f64 = v[rank..].iter().zip(&c[rank..]).map(|(a, b)| a * b).sum();
                let f = beta * dot;
                for (ci, vi) in c[rank..].iter_mut().zip(&v[rank..]) {
                    *ci -= f * vi;
                }
            }
            let mut rc = work.col(j)[..=rank].to_vec();
            rc[rank] = alpha;
            r_cols.push(rc);
            reflectors.push((v, beta));
            kept.push(j);
        }

        let rank = kept.len();
        let mut r = vec![0.0; rank * rank];
        for (c, rc) in r_cols.iter().enumerate() {
            for (i, &v) in rc.iter().enumerate() {
                r[c * rank + i] = v;
            }
        }
        Qr {
            n,
            kept,
            dropped,
            exhausted,
            reflectors,
            r,
        }
    }

    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    fn r_at(&self, i: usize, j: usize) -> f64 {
        self.r[j * self.rank() + i]
    }

    /// Qᵀ·y.
    pub fn qt_mul(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n);
        let mut out = y.to_vec();
        for (step, (v, beta)) in self.reflectors.iter().enumerate() {
            let dot: f64 = v[step..].iter().zip(&out[step..]).map(|(a, b)| a * b).sum();
            let f = beta * dot;
            for (o, vi) in out[step..].iter_mut().zip(&v[step..]) {
                *o -= f * vi;
            }
        }
        out
    }

    /// Least-squares coefficients for the kept columns.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let qty = self.qt_mul(y);
        self.back_substitute(&qty[..self.rank()])
    }

    /// Solves R·b = rhs.
    pub fn back_substitute(&self, rhs: &[f64]) -> Vec<f64> {
        let p = self.rank();
        let mut b = rhs[..p].to_vec();
        for i in (0..p).rev() {
            let mut s = b[i];
            for j in i + 1..p {
                s -= self.r_at(i, j) * b[j];
            }
            b[i] = s / self.r_at(i, i);
        }
        b
    }

    /// R⁻¹ (upper triangular, rank × rank, row-major rows as Vecs).
    pub fn r_inverse(&self) -> Vec<Vec<f64>> {
        let p = self.rank();
        let mut inv = vec![vec![0.0; p]; p];
        for col in 0..p {
            let mut e = vec![0.0; p];
            e[col] = 1.0;
            let x = self.back_substitute(&e);
            for (i, v) in x.into_iter().enumerate() {
                inv[i][col] = v;
            }
        }
        inv
    }

    /// (XᵀX)⁻¹ over the kept columns, = R⁻¹R⁻ᵀ.
    pub fn unscaled_covariance(&self) -> Vec<Vec<f64>> {
        let ri = self.r_inverse();
        let p = self.rank();
        let mut c = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                c[i][j] = (0..p).map(|l| ri[i][l] * ri[j][l]).sum();
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution() {
        let x = Matrix::from_columns(3, &[vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let qr = Qr::new(&x);
        let b = qr.solve(&[1.0, 3.0, 5.0]);
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!((b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_column_dropped_first_come_kept() {
        let x = Matrix::from_columns(
            4,
            &[
                vec![1.0, 1.0, 1.0, 1.0],
                vec![1.0, 2.0, 3.0, 4.0],
                vec![2.0, 4.0, 6.0, 8.0],
                vec![0.0, 1.0, 0.0, 1.0],
            ],
        );
        let qr = Qr::new(&x);
        assert_eq!(qr.kept, vec![0, 1, 3]);
        assert_eq!(qr.dropped, vec![2]);
        let zero = Matrix::from_columns(2, &[vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert_eq!(Qr::new(&zero).kept, vec![1]);
    }

    #[test]
    fn covariance_is_inverse_gram() {
        let x = Matrix::from_columns(
            4,
            &[vec![1.0, 1.0, 1.0, 1.0], vec![0.5, -1.0, 2.0, 3.0]],
        );
        let c = Qr::new(&x).unscaled_covariance();
        let g = [
            [4.0, 4.5],
            [4.5, 0.25 + 1.0 + 4.0 + 9.0],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let v: f64 = (0..2).map(|l| g[i][l] * c[l][j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-12);
            }
        }
    }
}
