//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iterations with Wilkinson-type
//! shifts (the EISPACK `tql2` scheme), accumulating complex eigenvectors.

use num_complex::Complex;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spectral decomposition `H = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and column `k` of
/// `eigenvectors` belongs to `eigenvalues[k]`. For degenerate eigenvalues
/// only the spanned eigenspace is meaningful.
#[derive(Clone, Debug)]
pub struct HermEigen<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermEigen<T> {
    /// Reassembles `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.map_spectrum(|l| l)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before factorization; inputs whose asymmetry
/// exceeds `1e-10 · max(1, ‖H‖_F)` are rejected.
pub fn herm_eig<T: Real>(h: &Matrix<T>) -> Result<HermEigen<T>> {
    if !h.is_square() {
        return Err(Error::NonSquare { rows: h.rows(), cols: h.cols() });
    }
    let n = h.rows();
    let tol = T::kernel_tol() * T::one().max(h.frobenius_norm());
    let defect = h.hermitian_defect();
    if !(defect <= tol) {
        return Err(Error::NotHermitian {
            asymmetry: defect.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut a = h.hermitian_part();
    if n == 1 {
        return Ok(HermEigen {
            eigenvalues: vec![a[(0, 0)].re],
            eigenvectors: Matrix::identity(1),
        });
    }

    let mut q = Matrix::<T>::identity(n);
    tridiagonalize(&mut a, &mut q);

    // Rotate the complex subdiagonal onto the nonnegative reals.
    let mut diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = vec![T::zero(); n];
    let mut phase = Complex::new(T::one(), T::zero());
    let mut phases = vec![phase; n];
    for i in 0..n - 1 {
        let sub = a[(i + 1, i)];
        let r = sub.norm();
        if r > T::zero() {
            phase = phase * (sub / r);
        }
        phases[i + 1] = phase;
        off[i] = r;
    }
    for j in 0..n {
        for i in 0..n {
            q[(i, j)] = q[(i, j)] * phases[j];
        }
    }

    tql2(&mut diag, &mut off, &mut q)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(HermEigen { eigenvalues, eigenvectors })
}

/// In-place Householder reduction `a ← P a P` with `q ← q P`, leaving `a`
/// Hermitian tridiagonal.
fn tridiagonalize<T: Real>(a: &mut Matrix<T>, q: &mut Matrix<T>) {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut v: Vec<Complex<T>> = (0..len).map(|r| a[(k + 1 + r, k)]).collect();
        let xnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        let tail = v[1..].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if xnorm == T::zero() || tail == T::zero() {
            continue;
        }
        let x0 = v[0];
        let ph = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::new(T::one(), T::zero()) };
        let alpha = -ph * xnorm;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }

        // left: rows k+1.. of a
        for j in 0..n {
            let w = (0..len).fold(zero, |acc, r| acc + v[r].conj() * a[(k + 1 + r, j)]);
            for r in 0..len {
                a[(k + 1 + r, j)] = a[(k + 1 + r, j)] - v[r] * w * two;
            }
        }
        // right: columns k+1.. of a and q
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let u = (0..len).fold(zero, |acc, r| acc + m[(i, k + 1 + r)] * v[r]);
                for r in 0..len {
                    m[(i, k + 1 + r)] = m[(i, k + 1 + r)] - u * v[r].conj() * two;
                }
            }
        }
    }
}

/// Implicit QL on the symmetric tridiagonal (`d`, `e`), where `e[i]` couples
/// rows `i` and `i + 1` and `e[n-1] = 0`. Rotations are applied to the
/// columns of `z`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], z: &mut Matrix<T>) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    e[n - 1] = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence("tridiagonal QL iteration".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = zk * s + zk1 * c;
                        z[(k, i)] = zk * c - zk1 * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ComplexMatrix;
    use num_complex::Complex64;

    #[test]
    fn diagonal_and_pauli_x() {
        let e = herm_eig(&ComplexMatrix::diag_real(&[1.0, 3.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = herm_eig(&sx).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_spectrum() {
        let m = ComplexMatrix::identity(5).scale_real(2.5);
        let e = herm_eig(&m).unwrap();
        assert!(e.eigenvalues.iter().all(|l| (l - 2.5).abs() < 1e-14));
        assert!((&e.reconstruct() - &m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn complex_tridiagonal_input() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = ComplexMatrix::from_vec(3, 3, vec![one, i, zero, -i, one * 2.0, i, zero, -i, one * 3.0]).unwrap();
        let e = herm_eig(&m).unwrap();
        assert!((&e.reconstruct() - &m).frobenius_norm() < 1e-12);
        let trace: f64 = e.eigenvalues.iter().sum();
        assert!((trace - 6.0).abs() < 1e-12);
    }
}
