use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use super::{c64, re, ALG_TOL, STRUCT_TOL};
use crate::error::{Error, Result};

/// A ket over a finite-dimensional Hilbert space.
#[derive(Clone, PartialEq)]
pub struct CVec(DVector<c64>);

impl CVec {
    pub fn new(entries: Vec<c64>) -> Self {
        assert!(!entries.is_empty(), "a ket needs at least one amplitude");
        CVec(DVector::from_vec(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| re(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![c64::new(0.0, 0.0); dim])
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = re(1.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[c64] {
        self.0.as_slice()
    }

    pub fn get(&self, i: usize) -> c64 {
        self.0[i]
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= ALG_TOL
    }

    /// Unit vector along `self`. Panics on the zero vector.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(re(1.0 / n))
    }

    pub fn scale(&self, k: c64) -> Self {
        CVec(&self.0 * k)
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVec) -> c64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.dotc(&other.0)
    }

    pub fn kron(&self, other: &CVec) -> CVec {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in self.0.iter() {
            for b in other.0.iter() {
                out.push(a * b);
            }
        }
        CVec::new(out)
    }

    /// Indices whose amplitude exceeds `tol` in modulus.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.0[i].norm() > tol)
            .collect()
    }

    pub(crate) fn inner_vec(&self) -> &DVector<c64> {
        &self.0
    }

    pub(crate) fn from_dvector(v: DVector<c64>) -> Self {
        CVec(v)
    }
}

impl Add for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        CVec(&self.0 + &rhs.0)
    }
}

impl Sub for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        CVec(&self.0 - &rhs.0)
    }
}

impl fmt::Debug for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A dense complex matrix (operators, operation elements, density matrices).
#[derive(Clone, PartialEq)]
pub struct CMat(DMatrix<c64>);

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMat(DMatrix::identity(n, n))
    }

    /// Build from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[c64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        CMat(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> Self {
        let z: Vec<c64> = entries.iter().map(|&x| re(x)).collect();
        Self::from_rows(rows, cols, &z)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.0[(i, i)] = re(d);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &CVec, v: &CVec) -> Self {
        CMat(u.inner_vec() * v.inner_vec().adjoint())
    }

    /// Orthogonal projector onto the span of `vectors` (which need not be
    /// orthogonal or independent).
    pub fn projector_onto(vectors: &[CVec]) -> Self {
        assert!(!vectors.is_empty());
        let dim = vectors[0].dim();
        let mut basis: Vec<CVec> = Vec::new();
        for v in vectors {
            let mut w = v.clone();
            for b in &basis {
                let k = b.inner(&w);
                w = &w - &b.scale(k);
            }
            if w.norm() > STRUCT_TOL {
                basis.push(w.normalized());
            }
        }
        let mut p = CMat::zeros(dim, dim);
        for b in &basis {
            p = &p + &CMat::outer(b, b);
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, value: c64) {
        self.0[(r, c)] = value;
    }

    pub fn adjoint(&self) -> CMat {
        CMat(self.0.adjoint())
    }

    pub fn scale(&self, k: c64) -> CMat {
        CMat(&self.0 * k)
    }

    pub fn trace(&self) -> c64 {
        self.0.trace()
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        assert_eq!(self.cols(), v.dim(), "matrix-vector dimension mismatch");
        CVec::from_dvector(&self.0 * v.inner_vec())
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        kron(self, other)
    }

    /// `⟨u|M|v⟩`.
    pub fn sandwich(&self, u: &CVec, v: &CVec) -> c64 {
        u.inner(&self.mul_vec(v))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows() == self.cols() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = CMat((&self.0 + self.0.adjoint()) * re(0.5));
        let mut ev: Vec<f64> = herm.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(ALG_TOL.max(tol * 1e-2))
            && self.hermitian_eigenvalues().first().copied().unwrap_or(0.0) >= -tol
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.0.clone().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > tol).count()
    }

    /// True when the matrix is diagonal within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows()).all(|r| (0..self.cols()).all(|c| r == c || self.get(r, c).norm() <= tol))
    }

    pub fn diagonal(&self) -> Vec<c64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.get(i, i))
            .collect()
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols(), rhs.rows(), "matrix product dimension mismatch");
        CMat(&self.0 * &rhs.0)
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        CMat(&self.0 + &rhs.0)
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        CMat(&self.0 - &rhs.0)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<c64>> = (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.get(r, c)).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Kronecker product; the first factor is the slow index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for i1 in 0..ra {
        for j1 in 0..ca {
            let x = a.get(i1, j1);
            if x == c64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out.set(i1 * rb + i2, j1 * cb + j2, x * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Gram matrix `G[i][j] = ⟨s_i|s_j⟩`.
pub fn gram(states: &[CVec]) -> Result<CMat> {
    let n = states.len();
    if n == 0 {
        return Err(Error::InvalidArgument("gram of an empty list".into()));
    }
    let dim = states[0].dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, states[i].inner(&states[j]));
        }
    }
    Ok(g)
}

/// Schmidt rank of a bipartite ket across the `dim_a × dim_b` cut.
pub fn schmidt_rank(state: &CVec, dim_a: usize, dim_b: usize) -> Result<usize> {
    if dim_a * dim_b != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: state.dim(),
        });
    }
    let coeff = CMat::from_rows(dim_a, dim_b, state.entries());
    Ok(coeff.rank(STRUCT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::c;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&CMat::identity(2), &CMat::identity(3));
        assert_eq!((k.rows(), k.cols()), (6, 6));
        assert!(k.max_abs_diff(&CMat::identity(6)) == 0.0);
    }

    #[test]
    fn product_ket() {
        let s = 0.5f64.sqrt();
        let plus = CVec::from_real(&[s, s]);
        let v = CVec::basis(2, 0).kron(&plus);
        let expected = CVec::from_real(&[s, s, 0.0, 0.0]);
        assert!((&v - &expected).norm() < 1e-15);
    }

    #[test]
    fn kron_index_order_first_factor_slow() {
        let a = CMat::from_real_rows(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = CMat::from_real_rows(3, 3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 7.0]);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        // (i1=1, i2=1; j1=0, j2=1) -> A(1,0)·B(1,1) = 3·5
        assert_eq!(k.get(4, 1), c(15.0, 0.0));
        assert_eq!(k.get(3 + 2, 3 + 2), c(28.0, 0.0));
    }

    #[test]
    fn gram_of_duplicate_is_all_ones() {
        let u = CVec::from_real(&[0.6, 0.8]);
        let g = gram(&[u.clone(), u]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get(i, j) - c(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_rejects_mixed_dimensions() {
        let err = gram(&[CVec::basis(2, 0), CVec::basis(3, 0)]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn schmidt_rank_basics() {
        assert_eq!(schmidt_rank(&CVec::basis(4, 0), 2, 2).unwrap(), 1);
        let s = 0.5f64.sqrt();
        let bell = CVec::from_real(&[s, 0.0, 0.0, s]);
        assert_eq!(schmidt_rank(&bell, 2, 2).unwrap(), 2);
        assert!(schmidt_rank(&bell, 3, 2).is_err());
    }

    #[test]
    fn projector_onto_nonorthogonal_pair() {
        let s = 0.5f64.sqrt();
        let u = CVec::from_real(&[1.0, 0.0, 0.0]);
        let v = CVec::from_real(&[s, s, 0.0]);
        let p = CMat::projector_onto(&[u, v]);
        let expected = CMat::from_diag(&[1.0, 1.0, 0.0]);
        assert!(p.max_abs_diff(&expected) < 1e-12);
        assert!(p.is_psd(STRUCT_TOL));
        assert_eq!(p.rank(STRUCT_TOL), 2);
    }

    #[test]
    fn hermitian_and_psd_predicates() {
        let m = CMat::from_rows(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        assert!(m.is_hermitian(1e-12));
        assert!(m.is_psd(1e-10));
        let n = CMat::from_real_rows(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(n.is_hermitian(1e-12));
        assert!(!n.is_psd(1e-10));
        let skew = CMat::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(!skew.is_hermitian(1e-12));
    }
}
