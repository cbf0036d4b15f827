//! Dense real linear algebra.
//!
//! A small row-major matrix type plus the handful of factorizations the rest of
//! the crate needs: LU solves, cyclic Jacobi eigendecomposition of symmetric
//! matrices, an SVD built on top of it, and the spectral norm.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Smallest pivot magnitude accepted by [`solve_linear`].
pub const PIVOT_TOL: f64 = 1e-12;
/// Target accuracy for reconstructions from factorizations.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Symmetry tolerance accepted by [`symmetric_eig`].
pub const SYMMETRY_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense matrix: `data[i * cols + j]` holds entry `(i, j)`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

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

    /// Builds a matrix from equally sized rows.
    ///
    /// Panics when the rows have different lengths.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_mul_vec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = out.row_mut(i);
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// `[self, other]`.
    pub fn hstack(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Self {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block diagonal `[self, 0; 0, other]`.
    pub fn block_diag(&self, other: &DenseMatrix) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, expected {}",
            b.len(),
            a.rows
        )));
    }
    let lu = LuFactors::factor(a)?;
    Ok(lu.solve(b))
}

/// Inverse via LU; fails with [`Error::SingularMatrix`] like [`solve_linear`].
pub fn invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("invert needs a square matrix".into()));
    }
    let n = a.rows;
    let lu = LuFactors::factor(a)?;
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = lu.solve(&e);
        for (i, v) in col.into_iter().enumerate() {
            inv[(i, j)] = v;
        }
    }
    Ok(inv)
}

/// LU factors with row permutation, `P A = L U` packed in one matrix.
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot < PIVOT_TOL {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// Eigenvalues in descending order with unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        v.matmul(&DenseMatrix::from_diag(&self.eigenvalues))
            .matmul(&v.transpose())
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn symmetric_eig(m: &DenseMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("symmetric_eig needs a square matrix".into()));
    }
    let n = m.rows;
    let scale = 1.0 + m.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a = m.clone();
    // symmetrize exactly so rotations act on a truly symmetric matrix
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let frob = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-16 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() < 1e-300 {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = v.select_columns(&order);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin singular value decomposition `M = U diag(σ) Vt`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m × k` left factor, `k = min(m, n)`.
    pub u: DenseMatrix,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `k × n` right factor; its rows are right singular vectors.
    pub vt: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u
            .matmul(&DenseMatrix::from_diag(&self.singular_values))
            .matmul(&self.vt)
    }
}

/// SVD through the eigendecomposition of the smaller Gram matrix.
pub fn svd(m: &DenseMatrix) -> Svd {
    if m.rows < m.cols {
        let t = svd(&m.transpose());
        return Svd {
            u: t.vt.transpose(),
            singular_values: t.singular_values,
            vt: t.u.transpose(),
        };
    }
    let (rows, cols) = m.shape();
    let gram = m.transpose().matmul(m);
    let eig = symmetric_eig(&gram).expect("Gram matrix is symmetric");

    // σ recomputed as ‖M v‖ is more accurate than √λ for small values
    let mut triples: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..cols)
        .map(|j| {
            let v = eig.eigenvectors.column(j);
            let mv = m.mul_vec(&v);
            (norm2(&mv), mv, v)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));

    let sigma_max = triples.first().map_or(0.0, |t| t.0);
    let tiny = f64::EPSILON * sigma_max.max(f64::MIN_POSITIVE) * (rows.max(cols) as f64);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut sigma = Vec::with_capacity(cols);
    let mut vt = DenseMatrix::zeros(cols, cols);
    for (k, (s, mv, v)) in triples.into_iter().enumerate() {
        for (j, &x) in v.iter().enumerate() {
            vt[(k, j)] = x;
        }
        let u = if s > tiny {
            mv.iter().map(|x| x / s).collect()
        } else {
            complete_orthonormal(&u_cols, rows)
        };
        u_cols.push(u);
        sigma.push(s);
    }
    Svd {
        u: DenseMatrix::from_columns(&u_cols, rows),
        singular_values: sigma,
        vt,
    }
}

/// A unit vector orthogonal to `basis`, found by Gram-Schmidt on coordinate axes.
fn complete_orthonormal(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for axis in 0..dim {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let p = dot(&e, b);
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= p * bi;
                }
            }
        }
        let n = norm2(&e);
        if n > best_norm {
            best_norm = n;
            best = Some(e);
        }
        if n > 0.5 {
            break;
        }
    }
    let e = best.expect("dimension is positive");
    e.iter().map(|x| x / best_norm).collect()
}

/// Largest singular value, `√λmax(MᵀM)`.
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    let gram = if m.rows >= m.cols {
        m.transpose().matmul(m)
    } else {
        m.matmul(&m.transpose())
    };
    let eig = symmetric_eig(&gram).expect("Gram matrix is symmetric");
    eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
        let data = (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(r, c, data).unwrap()
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for b in &cols {
                    let p = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= p * bi);
                }
            }
            let nv = norm2(&v);
            if nv > 1e-3 {
                cols.push(v.iter().map(|x| x / nv).collect());
            }
        }
        DenseMatrix::from_columns(&cols, n)
    }

    fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn solve_identity_diagonal_and_mixed() {
        let x = solve_linear(&DenseMatrix::identity(2), &[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![3.0, 4.0]);
        let a = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]);
        assert_eq!(solve_linear(&a, &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]);
        let x = solve_linear(&a, &[2.0, 0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(solve_linear(&a, &[1.0, 2.0]), Err(Error::SingularMatrix));
        assert_eq!(
            solve_linear(&DenseMatrix::zeros(1, 2), &[0.0]).unwrap_err(),
            Error::DimensionMismatch("solve_linear needs a square matrix, got 1x2".into())
        );
    }

    #[test]
    fn solve_residual_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            let a = random_matrix(&mut rng, n, n);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let r = a.mul_vec(&x);
            let res = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(res <= 1e-9 * (1.0 + norm_inf(&b)), "n={n} residual {res}");
        }
    }

    #[test]
    fn eig_known_spectra() {
        let e = symmetric_eig(&DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        let e = symmetric_eig(&DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert_eq!(symmetric_eig(&m).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn eig_recovers_planted_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_orthogonal(&mut rng, 5);
        let lambda = [3.5, 2.0, 0.25, -1.0, -4.0];
        let m = q.matmul(&DenseMatrix::from_diag(&lambda)).matmul(&q.transpose());
        let e = symmetric_eig(&m).unwrap();
        for (got, want) in e.eigenvalues.iter().zip(lambda) {
            assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        }
    }

    #[test]
    fn eig_reconstruction_and_orthonormality_up_to_50() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[1usize, 2, 3, 7, 20, 50] {
            let b = random_matrix(&mut rng, n, n);
            let m = b.add(&b.transpose());
            let e = symmetric_eig(&m).unwrap();
            assert!(max_abs_diff(&e.reconstruct(), &m) <= 1e-8, "n={n}");
            let vtv = e.eigenvectors.transpose().matmul(&e.eigenvectors);
            assert!(max_abs_diff(&vtv, &DenseMatrix::identity(n)) <= 1e-8);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let scale = 1.0 + spectral_norm(&m);
            for j in 0..n {
                let v = e.eigenvectors.column(j);
                let mv = m.mul_vec(&v);
                let res = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - e.eigenvalues[j] * b).abs())
                    .fold(0.0, f64::max);
                assert!(res <= 1e-8 * scale);
            }
        }
    }

    #[test]
    fn svd_examples() {
        let s = svd(&DenseMatrix::from_diag(&[3.0, 4.0]));
        assert!((s.singular_values[0] - 4.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 3.0).abs() < 1e-14);

        let u = [1.0, -2.0, 0.5];
        let v = [0.3, 1.0, 2.0, -1.0];
        let outer = DenseMatrix::from_columns(
            &v.iter().map(|vj| u.iter().map(|ui| ui * vj).collect()).collect::<Vec<_>>(),
            3,
        );
        let s = svd(&outer);
        let big = s.singular_values.iter().filter(|&&x| x > 1e-8).count();
        assert_eq!(big, 1);
        assert!(max_abs_diff(&s.reconstruct(), &outer) <= 1e-8);
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        // oracle: eigenvalues of MᵀM computed independently
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 4, 6);
        let s = svd(&m);
        assert!(max_abs_diff(&s.reconstruct(), &m) <= 1e-8);
        let e = symmetric_eig(&m.transpose().matmul(&m)).unwrap();
        for (k, sv) in s.singular_values.iter().enumerate() {
            assert!((sv * sv - e.eigenvalues[k]).abs() < 1e-7);
        }
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&DenseMatrix::from_diag(&[3.0, 4.0])) - 4.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&DenseMatrix::zeros(3, 2)), 0.0);
        let m = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        let want = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!((spectral_norm(&m) - want).abs() < 1e-12);
    }

    #[test]
    fn invert_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 6, 6);
        let inv = invert(&a).unwrap();
        assert!(max_abs_diff(&a.matmul(&inv), &DenseMatrix::identity(6)) < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy() -> impl Strategy<Value = DenseMatrix> {
            (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-10.0f64..10.0, r * c)
                    .prop_map(move |d| DenseMatrix::new(r, c, d).unwrap())
            })
        }

        proptest! {
            #[test]
            fn svd_of_transpose_has_same_spectrum(m in matrix_strategy()) {
                let a = svd(&m).singular_values;
                let b = svd(&m.transpose()).singular_values;
                prop_assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-8 * (1.0 + a[0]));
                }
            }

            #[test]
            fn spectral_norm_is_root_of_gram_top_eigenvalue(m in matrix_strategy()) {
                let e = symmetric_eig(&m.transpose().matmul(&m)).unwrap();
                let want = e.eigenvalues[0].max(0.0).sqrt();
                prop_assert!((spectral_norm(&m) - want).abs() <= 1e-8 * (1.0 + want));
            }

            #[test]
            fn svd_reconstructs(m in matrix_strategy()) {
                let s = svd(&m);
                prop_assert!(s.reconstruct().sub(&m).max_abs() <= 1e-8 * (1.0 + m.max_abs()));
            }
        }
    }
}
