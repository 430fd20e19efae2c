use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix. Equality is always tolerance based, see
/// [`CMat::approx_eq`].
#[derive(Clone, Debug)]
pub struct CMat(DMatrix<C64>);

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMat(DMatrix::identity(n, n))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty matrix {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(CMat(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMat(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|u⟩⟨u|`.
    pub fn projector(u: &[C64]) -> Self {
        Self::outer(u, u)
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        CMat(m)
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        CMat(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMat(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMat, tol: f64) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && (self - other).max_abs() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).approx_eq(&CMat::identity(self.rows()), tol)
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, rhs: &'a CMat) -> CMat {
        CMat(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, rhs: &'a CMat) -> CMat {
        CMat(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, rhs: &'a CMat) -> CMat {
        CMat(&self.0 - &rhs.0)
    }
}

/// Tensor product with `a` as the major index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    CMat(a.0.kronecker(&b.0))
}

/// Eigendecomposition of the Hermitian part of `h`. Eigenvalues come back in
/// ascending order with matching eigenvector columns.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !h.is_square() {
        return Err(Error::Shape(format!("eigh of {}x{}", h.rows(), h.cols())));
    }
    let eig = SymmetricEigen::new(h.hermitian_part().0);
    let mut order: Vec<usize> = (0..h.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(h.rows(), h.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Thin SVD `m = W Σ V†`, returned as `(W, σ, V†)` with `σ` descending.
///
/// One-sided Jacobi. nalgebra's bidiagonal SVD loses digits on some
/// rank-deficient complex inputs, which matters for Uhlmann overlaps.
/// Columns of `W` belonging to zero singular values are completed to an
/// orthonormal set.
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    if m.rows() < m.cols() {
        let (w, s, v_adj) = svd(&m.adjoint());
        return (v_adj.adjoint(), s, w.adjoint());
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut a = m.0.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, i)];
                        let y = mat[(r, j)] * phase.conj();
                        mat[(r, i)] = x * c - y * s;
                        mat[(r, j)] = (x * s + y * c) * phase;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let scale = norms.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut w = DMatrix::<C64>::zeros(rows, n);
    let mut sigma = Vec::with_capacity(n);
    let mut filled = Vec::new();
    for (col, &k) in order.iter().enumerate() {
        sigma.push(norms[k]);
        if norms[k] > 1e-13 * scale {
            w.set_column(col, &(a.column(k) / C64::new(norms[k], 0.0)));
            filled.push(col);
        }
    }
    // Complete W with standard basis vectors orthogonalized against the
    // columns already present.
    let mut basis = 0;
    for col in 0..n {
        if filled.contains(&col) {
            continue;
        }
        loop {
            let mut cand = nalgebra::DVector::<C64>::zeros(rows);
            cand[basis] = C64::new(1.0, 0.0);
            basis += 1;
            for _pass in 0..2 {
                for &f in &filled {
                    let proj = w.column(f).dotc(&cand);
                    cand -= w.column(f) * proj;
                }
            }
            let nn = cand.norm();
            if nn > 1e-6 {
                w.set_column(col, &(cand / C64::new(nn, 0.0)));
                filled.push(col);
                break;
            }
        }
    }
    let v_sorted = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (CMat(w), sigma, CMat(v_sorted.adjoint()))
}

pub(crate) fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m).1
}
