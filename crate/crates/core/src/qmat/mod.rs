//! Dense complex matrices and the handful of linear-algebra primitives the
//! channel and solver layers are built on.
//!
//! Storage is plain row-major. Everything here is sized for operators on at
//! most a few dozen dimensions, so no blocking or sparsity is attempted.

mod eigen;

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use eigen::{herm_eig, HermEigen};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Which tensor factor of a bipartite operator to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Range("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor from real-valued rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn diag(values: &[Complex<T>]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(*v, T::zero());
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex<T>]) {
        for (i, z) in v.iter().enumerate() {
            self[(i, j)] = *z;
        }
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        let n = self.rows.min(self.cols);
        (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(row) {
                    *o = *o + a * *b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `Re Tr(self * other)`; the real inner product for Hermitian operands.
    pub fn re_trace_product(&self, other: &Self) -> T {
        assert_eq!((self.cols, self.rows), (other.rows, other.cols), "trace product shape");
        let mut acc = T::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                let b = other[(k, i)];
                acc = acc + a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// Largest entrywise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Frobenius distance of `A†A` from the identity.
    pub fn unitary_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.dagger().matmul(self) - &Self::identity(self.rows)).frobenius_norm()
    }

    /// Lower Cholesky factor `L` with `self = L L†`; fails unless the matrix
    /// is Hermitian positive definite.
    pub fn cholesky(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut diag = self[(j, j)].re;
            for k in 0..j {
                diag = diag - l[(j, k)].norm_sqr();
            }
            if !(diag > T::zero()) {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = diag.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix with nonzero diagonal.
    pub fn lower_triangular_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = self[(j, j)].inv();
            for i in (j + 1)..n {
                let mut s = Complex::new(T::zero(), T::zero());
                for k in j..i {
                    s = s + self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a Hermitian positive definite matrix.
    pub fn hpd_inverse(&self) -> Result<Self> {
        let linv = self.cholesky()?.lower_triangular_inverse();
        Ok(linv.dagger().matmul(&linv))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> AddAssign<&Matrix<T>> for Matrix<T> {
    fn add_assign(&mut self, rhs: &Matrix<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Real> SubAssign<&Matrix<T>> for Matrix<T> {
    fn sub_assign(&mut self, rhs: &Matrix<T>) {
        self.axpy(-T::one(), rhs);
    }
}

/// Kronecker product; `(a ⊗ b)[(i*p + k, j*q + l)] = a[i,j] b[k,l]`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (p, q) = (b.rows, b.cols);
    Matrix::from_fn(a.rows * p, a.cols * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// Conjugate transpose.
pub fn dagger<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    a.dagger()
}

/// Partial trace of an operator on `dims.0 ⊗ dims.1`.
pub fn partial_trace<T: Real>(m: &Matrix<T>, dims: (usize, usize), traced: Factor) -> Result<Matrix<T>> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || !m.is_square() || m.rows != d1 * d2 {
        return Err(Error::DimMismatch(format!(
            "{}x{} operator is not on a {d1}x{d2} tensor product",
            m.rows, m.cols
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    Ok(match traced {
        Factor::First => Matrix::from_fn(d2, d2, |k, l| {
            (0..d1).fold(zero, |acc, i| acc + m[(i * d2 + k, i * d2 + l)])
        }),
        Factor::Second => Matrix::from_fn(d1, d1, |i, j| {
            (0..d2).fold(zero, |acc, k| acc + m[(i * d2 + k, j * d2 + k)])
        }),
    })
}

/// Hermitian dilation `[[0, A], [A†, 0]]`, whose eigenvalues are `±s_i(A)`.
fn dilation<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let (r, c) = (a.rows, a.cols);
    let zero = Complex::new(T::zero(), T::zero());
    Matrix::from_fn(r + c, r + c, |i, j| match (i < r, j < r) {
        (true, false) => a[(i, j - r)],
        (false, true) => a[(j, i - r)].conj(),
        _ => zero,
    })
}

/// Trace norm `Tr sqrt(A†A)`, the sum of singular values.
pub fn trace_norm<T: Real>(a: &Matrix<T>) -> Result<T> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows, cols: a.cols });
    }
    let scale = T::one().max(a.frobenius_norm());
    if a.is_hermitian(T::kernel_tol() * scale) {
        let eig = herm_eig(a)?;
        return Ok(eig.eigenvalues.iter().fold(T::zero(), |acc, l| acc + l.abs()));
    }
    let eig = herm_eig(&dilation(a))?;
    let sum = eig.eigenvalues.iter().fold(T::zero(), |acc, l| acc + l.abs());
    Ok(sum * T::lit(0.5))
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(a: &Matrix<T>) -> T {
    if a.rows == 0 || a.cols == 0 {
        return T::zero();
    }
    let scale = T::one().max(a.frobenius_norm());
    let eig = if a.is_square() && a.is_hermitian(T::kernel_tol() * scale) {
        herm_eig(a)
    } else {
        herm_eig(&dilation(a))
    };
    // Both inputs are Hermitian by construction, so the eigensolver cannot reject them.
    let eig = eig.expect("hermitian input");
    eig.eigenvalues.iter().fold(T::zero(), |acc, l| acc.max(l.abs()))
}
