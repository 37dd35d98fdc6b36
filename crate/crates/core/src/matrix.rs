//! Dense matrices and the exact/thresholded linear algebra the rest of the
//! crate is built on.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Inertia, Scalar, Tol};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from rows; `cols` is needed to shape an empty row list.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::dim(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Mat { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Mat<U>> {
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Mat::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Mat::from_fn(rows.len(), self.cols, |r, c| self[(rows[r], c)].clone())
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Mat::from_fn(self.rows, self.cols + o.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                o[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Mat { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl<F: Scalar> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn diag(d: &[F]) -> Self {
        let n = d.len();
        Mat::from_fn(n, n, |r, c| if r == c { d[r].clone() } else { F::zero() })
    }

    pub fn column(v: &[F]) -> Self {
        Mat::from_vec(v.len(), 1, v.to_vec())
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&Mat<F>]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    m[(r0 + r, c0 + c)] = b[(r, c)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out: Mat<F> = Mat::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].clone() + o[(r, c)].clone())
    }

    pub fn sub(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].clone() - o[(r, c)].clone())
    }

    pub fn scale(&self, s: &F) -> Mat<F> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Mat<F> {
        self.map(|x| -x.clone())
    }

    pub fn pow(&self, k: usize) -> Mat<F> {
        assert!(self.is_square());
        let mut out = Mat::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: Tol) -> bool {
        let scale = self.max_magnitude();
        self.data.iter().all(|x| x.negligible(scale.max(1.0), tol))
    }

    /// Entrywise equality, thresholded relative to the larger operand.
    pub fn approx_eq(&self, o: &Mat<F>, tol: Tol) -> bool {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return false;
        }
        let scale = self.max_magnitude().max(o.max_magnitude()).max(1.0);
        self.data.iter().zip(&o.data).all(|(a, b)| (a.clone() - b.clone()).negligible(scale, tol))
    }

    pub fn is_hermitian(&self, tol: Tol) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_skew_hermitian(&self, tol: Tol) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint().neg(), tol)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, tol: Tol) -> (Mat<F>, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.max_magnitude();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pick = if F::EXACT {
                (row..m.rows).find(|&r| !m[(r, col)].is_zero())
            } else {
                (row..m.rows)
                    .filter(|&r| !m[(r, col)].negligible(scale, tol))
                    .max_by(|&a, &b| {
                        m[(a, col)]
                            .magnitude()
                            .partial_cmp(&m[(b, col)].magnitude())
                            .unwrap_or(Ordering::Equal)
                    })
            };
            let Some(p) = pick else {
                for r in row..m.rows {
                    m[(r, col)] = F::zero();
                }
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("nonzero pivot");
            for c in col..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for c in col..m.cols {
                    let v = f.clone() * m[(row, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
                m[(r, col)] = F::zero();
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, tol: Tol) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of the right null space, as columns.
    pub fn nullspace(&self, tol: Tol) -> Mat<F> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                out[(p, k)] = -r[(i, f)].clone();
            }
        }
        out
    }

    /// Indices of a maximal independent set of columns (first-come).
    pub fn independent_cols(&self, tol: Tol) -> Vec<usize> {
        self.rref(tol).1
    }

    /// A basis of the column space chosen among the columns.
    pub fn column_space(&self, tol: Tol) -> Mat<F> {
        self.select_cols(&self.independent_cols(tol))
    }

    /// Some solution `x` of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[F], tol: Tol) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Mat::column(b));
        let (r, pivots) = aug.rref(tol);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self, tol: Tol) -> Option<Mat<F>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Mat::identity(n)).rref(tol);
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn det(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for k in 0..n {
            let pick = if F::EXACT {
                (k..n).find(|&r| !m[(r, k)].is_zero())
            } else {
                (k..n).max_by(|&a, &b| {
                    m[(a, k)].magnitude().partial_cmp(&m[(b, k)].magnitude()).unwrap_or(Ordering::Equal)
                })
            };
            let Some(p) = pick else { return F::zero() };
            if m[(p, k)].is_zero() {
                return F::zero();
            }
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let piv = m[(k, k)].clone();
            det = det * piv.clone();
            let inv = piv.inv().unwrap();
            for r in k + 1..n {
                if m[(r, k)].is_zero() {
                    continue;
                }
                let f = m[(r, k)].clone() * inv.clone();
                for c in k..n {
                    let v = f.clone() * m[(k, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
        }
        det
    }

    /// Inertia of a Hermitian matrix (dispatches on the backend).
    pub fn inertia(&self, tol: Tol) -> Result<Inertia> {
        if !self.is_square() {
            return Err(Error::dim("inertia of a non-square matrix"));
        }
        F::hermitian_inertia(self, tol)
    }
}

/// Inertia by symmetric pivoted elimination (congruence diagonalisation).
/// Exact for exact backends.
pub fn ldl_inertia<F: Scalar>(h: &Mat<F>, tol: Tol) -> Result<Inertia> {
    let mut m = h.clone();
    let n = m.rows();
    let scale = h.max_magnitude();
    let mut active: Vec<usize> = (0..n).collect();
    let mut out = Inertia::default();
    while !active.is_empty() {
        let nz = |x: &F| !x.negligible(scale, tol);
        let mut pivot = active.iter().copied().find(|&k| nz(&m[(k, k)]));
        if pivot.is_none() {
            let pair = active.iter().copied().find_map(|k| {
                active.iter().copied().find(|&l| l != k && nz(&m[(k, l)])).map(|l| (k, l))
            });
            let Some((k, l)) = pair else {
                out.zero += active.len();
                break;
            };
            // replace e_k by e_k + c e_l with c = conj(h_kl): new h_kk = 2|h_kl|^2
            let c = m[(k, l)].conj();
            let cc = c.conj();
            for j in 0..n {
                let v = m[(j, l)].clone() * c.clone();
                m[(j, k)] = m[(j, k)].clone() + v;
            }
            for j in 0..n {
                let v = cc.clone() * m[(l, j)].clone();
                m[(k, j)] = m[(k, j)].clone() + v;
            }
            pivot = Some(k);
        }
        let k = pivot.unwrap();
        let d = m[(k, k)].clone();
        match d.real_sign()? {
            Ordering::Greater => out.pos += 1,
            Ordering::Less => out.neg += 1,
            Ordering::Equal => unreachable!("pivot is nonzero"),
        }
        let dinv = d.inv().unwrap();
        active.retain(|&x| x != k);
        for &i in &active {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = m[(i, k)].clone() * dinv.clone();
            for &j in &active {
                let v = f.clone() * m[(k, j)].clone();
                m[(i, j)] = m[(i, j)].clone() - v;
            }
        }
    }
    Ok(out)
}

/// A linear subspace of `F^n`, given by a basis of columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    basis: Mat<F>,
}

impl<F: Scalar> Subspace<F> {
    /// Span of the columns of `m`.
    pub fn span(m: &Mat<F>, tol: Tol) -> Self {
        Subspace { basis: m.column_space(tol) }
    }

    /// Wraps a matrix whose columns are already independent.
    pub fn from_basis(basis: Mat<F>) -> Self {
        Subspace { basis }
    }

    pub fn zero(n: usize) -> Self {
        Subspace { basis: Mat::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Subspace { basis: Mat::identity(n) }
    }

    pub fn kernel(m: &Mat<F>, tol: Tol) -> Self {
        Subspace { basis: m.nullspace(tol) }
    }

    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn contains_vec(&self, v: &[F], tol: Tol) -> bool {
        self.basis.solve(v, tol).is_some()
    }

    pub fn contains(&self, o: &Subspace<F>, tol: Tol) -> bool {
        (0..o.dim()).all(|c| self.contains_vec(&o.basis.col(c), tol))
    }

    pub fn same_as(&self, o: &Subspace<F>, tol: Tol) -> bool {
        self.dim() == o.dim() && self.contains(o, tol)
    }

    pub fn sum(&self, o: &Subspace<F>, tol: Tol) -> Self {
        Subspace::span(&self.basis.hstack(&o.basis), tol)
    }

    pub fn intersect(&self, o: &Subspace<F>, tol: Tol) -> Self {
        let n = self.ambient();
        if self.dim() == 0 || o.dim() == 0 {
            return Subspace::zero(n);
        }
        let k = self.basis.hstack(&o.basis.neg()).nullspace(tol);
        let coeffs = Mat::from_fn(self.dim(), k.cols(), |r, c| k[(r, c)].clone());
        Subspace::span(&self.basis.mul(&coeffs), tol)
    }

    /// Image under a linear map.
    pub fn image(&self, a: &Mat<F>, tol: Tol) -> Self {
        Subspace::span(&a.mul(&self.basis), tol)
    }

    /// A complement: columns of the identity completing the basis.
    pub fn complement(&self, tol: Tol) -> Self {
        let n = self.ambient();
        let all = self.basis.hstack(&Mat::identity(n));
        let idx = all.independent_cols(tol);
        let extra: Vec<usize> = idx.into_iter().filter(|&c| c >= self.dim()).collect();
        Subspace { basis: all.select_cols(&extra) }
    }

    /// Orthogonal complement for the standard Hermitian product.
    pub fn orthogonal_complement(&self, tol: Tol) -> Self {
        if self.dim() == 0 {
            return Subspace::full(self.ambient());
        }
        Subspace { basis: self.basis.adjoint().nullspace(tol) }
    }
}

impl<F: Scalar> fmt::Display for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;
    use num_complex::Complex64;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::from_ints(re, im)
    }

    fn gm(rows: &[&[(i64, i64)]]) -> Mat<GaussRat> {
        let n = rows[0].len();
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| g(a, b)).collect()).collect(), n)
            .unwrap()
    }

    #[test]
    fn nullspace_and_rank() {
        let a = gm(&[&[(1, 0), (2, 0), (3, 0)], &[(2, 0), (4, 0), (6, 0)]]);
        assert_eq!(a.rank(Tol::default()), 1);
        let k = a.nullspace(Tol::default());
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero(Tol::default()));
    }

    #[test]
    fn inverse_and_det() {
        let a = gm(&[&[(1, 1), (2, 0)], &[(0, -1), (3, 0)]]);
        let inv = a.inverse(Tol::default()).unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert_eq!(a.det(), g(3, 5));
    }

    #[test]
    fn inertia_zero_diagonal() {
        // [[0, 1+i], [1-i, 0]] has eigenvalues +-sqrt 2
        let h = gm(&[&[(0, 0), (1, 1)], &[(1, -1), (0, 0)]]);
        let i = h.inertia(Tol::default()).unwrap();
        assert_eq!((i.pos, i.neg, i.zero), (1, 1, 0));
        let z = Mat::<GaussRat>::zeros(3, 3);
        assert_eq!(z.inertia(Tol::default()).unwrap().zero, 3);
    }

    #[test]
    fn float_inertia_matches_exact() {
        let h = gm(&[&[(2, 0), (1, 1), (0, 0)], &[(1, -1), (-1, 0), (3, 0)], &[(0, 0), (3, 0), (0, 0)]]);
        let exact = h.inertia(Tol::default()).unwrap();
        let hf: Mat<Complex64> = h.map(|x| x.to_complex());
        assert_eq!(hf.inertia(Tol::default()).unwrap(), exact);
    }

    #[test]
    fn subspace_intersection() {
        let tol = Tol::default();
        let a = Subspace::span(&gm(&[&[(1, 0), (0, 0)], &[(0, 0), (1, 0)], &[(0, 0), (0, 0)]]), tol);
        let b = Subspace::span(&gm(&[&[(0, 0), (0, 0)], &[(1, 0), (0, 0)], &[(0, 0), (1, 0)]]), tol);
        let c = a.intersect(&b, tol);
        assert_eq!(c.dim(), 1);
        assert!(c.contains_vec(&[g(0, 0), g(1, 0), g(0, 0)], tol));
        assert_eq!(a.sum(&b, tol).dim(), 3);
        assert_eq!(a.complement(tol).dim(), 1);
    }
}
