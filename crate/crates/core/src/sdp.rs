//! Small dense primal–dual interior-point solver for linear matrix
//! inequalities over complex Hermitian blocks.
//!
//! Problems are stated in the form
//!
//! ```text
//! maximize   bᵀy
//! subject to Z_k = C_k + Σ_i y_i F_ik ⪰ 0      for every block k
//! ```
//!
//! whose conic dual is `minimize Σ_k ⟨C_k, X_k⟩` subject to
//! `Σ_k ⟨F_ik, X_k⟩ = −b_i`, `X_k ⪰ 0`. Iterates follow the HKM search
//! direction with a Mehrotra predictor–corrector. Coefficient matrices are
//! stored sparsely; the Schur complement is assembled entry by entry from the
//! nonzeros, which keeps the cost far below the dense `O(m² n³)` bound for
//! the diamond-norm programs this crate builds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::herm_eig;
use crate::ComplexMatrix;

/// Hermitian matrix given by its nonzero entries (both triangles listed).
#[derive(Clone, Debug, Default)]
pub struct SparseHermitian {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    pub fn new(entries: Vec<(usize, usize, Complex64)>) -> Self {
        Self { entries }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v.norm() > 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect() }
    }

    /// `I_outer ⊗ self`.
    pub fn lift_to_second_factor(&self, outer: usize, inner: usize) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len() * outer);
        for i in 0..outer {
            for &(r, c, v) in &self.entries {
                entries.push((i * inner + r, i * inner + c, v));
            }
        }
        Self { entries }
    }

    /// `Re Tr(self · y)`.
    pub fn inner(&self, y: &ComplexMatrix) -> f64 {
        self.entries.iter().map(|&(r, c, v)| (v * y[(c, r)]).re).sum()
    }

    pub fn add_to(&self, out: &mut ComplexMatrix, s: f64) {
        for &(r, c, v) in &self.entries {
            out[(r, c)] += v * s;
        }
    }

    pub fn to_dense(&self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Orthonormal basis (under `Re Tr(AB)`) of the `n²`-dimensional real space of
/// `n×n` Hermitian matrices: diagonal units, then symmetric and antisymmetric
/// off-diagonal pairs scaled by `1/√2`.
pub fn hermitian_basis(n: usize) -> Vec<SparseHermitian> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(SparseHermitian::new(vec![(i, i, Complex64::new(1.0, 0.0))]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(SparseHermitian::new(vec![
                (i, j, Complex64::new(h, 0.0)),
                (j, i, Complex64::new(h, 0.0)),
            ]));
            out.push(SparseHermitian::new(vec![
                (i, j, Complex64::new(0.0, h)),
                (j, i, Complex64::new(0.0, -h)),
            ]));
        }
    }
    out
}

/// Orthonormal basis of the traceless Hermitian `n×n` matrices (generalized
/// Gell-Mann matrices scaled to unit Frobenius norm).
pub fn traceless_basis(n: usize) -> Vec<SparseHermitian> {
    let mut out: Vec<SparseHermitian> = hermitian_basis(n).into_iter().skip(n).collect();
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut entries: Vec<_> = (0..l).map(|j| (j, j, Complex64::new(1.0 / norm, 0.0))).collect();
        entries.push((l, l, Complex64::new(-(l as f64) / norm, 0.0)));
        out.push(SparseHermitian::new(entries));
    }
    out
}

/// Iterations without a better iterate after which [`Lmi::solve`] gives up.
const STALL_ITERS: usize = 6;

/// Tuning knobs for [`Lmi::solve`].
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Stop once `Σ ⟨X_k, Z_k⟩` falls below this.
    pub gap_tol: f64,
    /// Stop once primal and dual residuals (max-abs) fall below this.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction of the step to the boundary that is taken.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-9, feas_tol: 1e-9, max_iter: 100, step_fraction: 0.98 }
    }
}

#[derive(Clone, Debug)]
pub struct LmiSolution {
    pub y: Vec<f64>,
    pub z: Vec<ComplexMatrix>,
    pub x: Vec<ComplexMatrix>,
    /// `bᵀy`.
    pub objective: f64,
    /// `Σ ⟨C_k, X_k⟩`.
    pub bound: f64,
    /// `Σ ⟨X_k, Z_k⟩` at exit.
    pub complementarity: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// False when the loop exited on the iteration cap or a numerical breakdown.
    pub converged: bool,
}

/// An LMI problem in the form described in the module docs.
#[derive(Clone, Debug)]
pub struct Lmi {
    block_dims: Vec<usize>,
    c: Vec<ComplexMatrix>,
    b: Vec<f64>,
    /// Per variable: `(block, A_ik)` with `A = −F`.
    a: Vec<Vec<(usize, SparseHermitian)>>,
}

struct Direction {
    dy: Vec<f64>,
    dz: Vec<ComplexMatrix>,
    dx: Vec<ComplexMatrix>,
}

impl Lmi {
    pub fn new(block_dims: Vec<usize>) -> Self {
        let c = block_dims.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        Self { block_dims, c, b: Vec::new(), a: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.b.len()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Adds a scalar variable with objective coefficient `objective`; returns its index.
    pub fn add_var(&mut self, objective: f64) -> usize {
        self.b.push(objective);
        self.a.push(Vec::new());
        self.b.len() - 1
    }

    pub fn set_constant(&mut self, block: usize, c: ComplexMatrix) {
        assert_eq!(c.rows(), self.block_dims[block], "constant term has wrong size");
        self.c[block] = c;
    }

    /// Adds `y_var · f` to block `block`.
    pub fn add_term(&mut self, var: usize, block: usize, f: SparseHermitian) {
        if f.entries.is_empty() {
            return;
        }
        self.a[var].push((block, f.scaled(-1.0)));
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> =
            self.block_dims.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        for (i, terms) in self.a.iter().enumerate() {
            if y[i] == 0.0 {
                continue;
            }
            for (k, m) in terms {
                m.add_to(&mut out[*k], y[i]);
            }
        }
        out
    }

    fn apply(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|terms| terms.iter().map(|(k, m)| m.inner(&x[*k])).sum())
            .collect()
    }

    /// `M_ij = Σ_k Re Tr(A_ik X_k A_jk Z_k⁻¹)`.
    fn schur(&self, x: &[ComplexMatrix], zinv: &[ComplexMatrix]) -> Vec<f64> {
        let m = self.num_vars();
        let mut out = vec![0.0; m * m];
        for (k, &n) in self.block_dims.iter().enumerate() {
            let members: Vec<(usize, &SparseHermitian)> = self
                .a
                .iter()
                .enumerate()
                .flat_map(|(i, terms)| {
                    terms.iter().filter(|(b, _)| *b == k).map(move |(_, s)| (i, s))
                })
                .collect();
            let (xk, zk) = (&x[k], &zinv[k]);
            for (pos, &(i, ai)) in members.iter().enumerate() {
                // H = Z⁻¹ A_i X
                let mut h = ComplexMatrix::zeros(n, n);
                for &(r, c, v) in &ai.entries {
                    for a in 0..n {
                        let za = zk[(a, r)] * v;
                        if za.re == 0.0 && za.im == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            h[(a, b)] += za * xk[(c, b)];
                        }
                    }
                }
                for &(j, aj) in &members[pos..] {
                    let val: f64 = aj.entries.iter().map(|&(r, c, v)| (v * h[(c, r)]).re).sum();
                    out[i * m + j] += val;
                    if i != j {
                        out[j * m + i] += val;
                    }
                }
            }
        }
        out
    }

    fn initial_point(&self, y0: Option<&[f64]>) -> (Vec<f64>, Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
        let m = self.num_vars();
        let y = y0.map_or_else(|| vec![0.0; m], |v| v.to_vec());
        let aty = self.apply_adjoint(&y);
        let a_norms: Vec<f64> = self
            .a
            .iter()
            .map(|t| t.iter().map(|(_, s)| s.frobenius_norm().powi(2)).sum::<f64>().sqrt())
            .collect();
        let xi = self
            .b
            .iter()
            .zip(&a_norms)
            .fold(1.0_f64, |acc, (b, a)| acc.max((1.0 + b.abs()) / (1.0 + a)));
        let mut z = Vec::with_capacity(self.block_dims.len());
        let mut x = Vec::with_capacity(self.block_dims.len());
        for (k, &n) in self.block_dims.iter().enumerate() {
            let zk = &self.c[k] - &aty[k];
            let usable = zk.cholesky().is_ok()
                && herm_eig(&zk).map(|e| e.min_eigenvalue() > 1e-8).unwrap_or(false);
            if usable {
                z.push(zk);
            } else {
                let eta = a_norms.iter().fold(1.0_f64.max(self.c[k].frobenius_norm()), |acc, a| acc.max(*a));
                z.push(ComplexMatrix::identity(n).scale_real(eta));
            }
            x.push(ComplexMatrix::identity(n).scale_real(xi));
        }
        (y, z, x)
    }

    /// Runs the interior-point iteration, optionally from a given `y`.
    ///
    /// When the stopping rule is not met, returns the iterate that came closest
    /// to it; the caller decides whether the certificates it yields suffice.
    pub fn solve(&self, opts: &SolverOptions, y0: Option<&[f64]>) -> Result<LmiSolution> {
        let m = self.num_vars();
        if m == 0 {
            return Err(Error::DimMismatch("LMI without variables".into()));
        }
        if y0.is_some_and(|v| v.len() != m) {
            return Err(Error::DimMismatch("initial point has wrong length".into()));
        }
        let total_dim: usize = self.block_dims.iter().sum();
        let (mut y, mut z, mut x) = self.initial_point(y0);
        let mut converged = false;
        let mut iterations = 0;
        let mut best: Option<(f64, usize, Vec<f64>, Vec<ComplexMatrix>, Vec<ComplexMatrix>)> = None;

        loop {
            let ax = self.apply(&x);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let aty = self.apply_adjoint(&y);
            let rd: Vec<ComplexMatrix> = (0..self.block_dims.len())
                .map(|k| &(&self.c[k] - &z[k]) - &aty[k])
                .collect();
            let comp: f64 = x.iter().zip(&z).map(|(xk, zk)| xk.re_trace_product(zk)).sum();
            let rp_max = rp.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            let rd_max = rd.iter().fold(0.0_f64, |acc, r| acc.max(r.max_abs()));
            if comp <= opts.gap_tol && rp_max <= opts.feas_tol && rd_max <= opts.feas_tol {
                converged = true;
                break;
            }
            let merit = (comp / opts.gap_tol).max(rp_max / opts.feas_tol).max(rd_max / opts.feas_tol);
            if best.as_ref().is_none_or(|b| merit < b.0) {
                best = Some((merit, iterations, y.clone(), z.clone(), x.clone()));
            } else if best.as_ref().is_some_and(|b| iterations - b.1 >= STALL_ITERS) {
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }
            let Ok(zinv) = z.iter().map(ComplexMatrix::hpd_inverse).collect::<Result<Vec<_>>>() else {
                break;
            };
            let schur = self.schur(&x, &zinv);
            let Some(factor) = cholesky_regularized(&schur, m) else {
                break;
            };
            let mu = comp / total_dim as f64;

            // predictor
            let base: Vec<ComplexMatrix> = (0..x.len())
                .map(|k| &(-&x[k]) - &x[k].matmul(&rd[k]).matmul(&zinv[k]))
                .collect();
            let pred = self.direction(&factor, &rp, &rd, &x, &zinv, &base);
            let Some((ap, ad)) = step_lengths(&x, &z, &pred) else {
                break;
            };
            let comp_aff: f64 = (0..x.len())
                .map(|k| {
                    let mut xa = x[k].clone();
                    xa.axpy(ap, &pred.dx[k]);
                    let mut za = z[k].clone();
                    za.axpy(ad, &pred.dz[k]);
                    xa.re_trace_product(&za)
                })
                .sum();
            let sigma = (comp_aff / comp).clamp(0.0, 1.0).powi(3);

            // corrector
            let corr_rhs: Vec<ComplexMatrix> = (0..x.len())
                .map(|k| {
                    let mut r = zinv[k].scale_real(sigma * mu);
                    r += &base[k];
                    r -= &pred.dx[k].matmul(&pred.dz[k]).matmul(&zinv[k]);
                    r
                })
                .collect();
            let dir = self.direction(&factor, &rp, &rd, &x, &zinv, &corr_rhs);
            let Some((ap, ad)) = step_lengths(&x, &z, &dir) else {
                break;
            };
            let tau = opts.step_fraction;
            let (ap, ad) = ((tau * ap).min(1.0), (tau * ad).min(1.0));
            for k in 0..x.len() {
                x[k].axpy(ap, &dir.dx[k]);
                x[k] = x[k].hermitian_part();
                z[k].axpy(ad, &dir.dz[k]);
                z[k] = z[k].hermitian_part();
            }
            for (yi, dyi) in y.iter_mut().zip(&dir.dy) {
                *yi += ad * dyi;
            }
            iterations += 1;
        }

        if !converged {
            if let Some((_, _, by, bz, bx)) = best {
                (y, z, x) = (by, bz, bx);
            }
        }
        let ax = self.apply(&x);
        let aty = self.apply_adjoint(&y);
        let primal_residual = self.b.iter().zip(&ax).fold(0.0_f64, |acc, (b, a)| acc.max((b - a).abs()));
        let dual_residual = (0..z.len())
            .map(|k| (&(&self.c[k] - &z[k]) - &aty[k]).max_abs())
            .fold(0.0_f64, f64::max);
        Ok(LmiSolution {
            objective: self.b.iter().zip(&y).map(|(b, y)| b * y).sum(),
            bound: self.c.iter().zip(&x).map(|(c, x)| c.re_trace_product(x)).sum(),
            complementarity: x.iter().zip(&z).map(|(xk, zk)| xk.re_trace_product(zk)).sum(),
            primal_residual,
            dual_residual,
            iterations,
            converged,
            y,
            z,
            x,
        })
    }

    /// Solves for the search direction given the centering right-hand side
    /// `r` (so that `ΔX = r + X (AᵀΔy) Z⁻¹`).
    fn direction(
        &self,
        factor: &[f64],
        rp: &[f64],
        rd: &[ComplexMatrix],
        x: &[ComplexMatrix],
        zinv: &[ComplexMatrix],
        r: &[ComplexMatrix],
    ) -> Direction {
        let ar = self.apply(r);
        let rhs: Vec<f64> = rp.iter().zip(&ar).map(|(p, a)| p - a).collect();
        let mut dy = cholesky_solve(factor, &rhs);
        let build_dx = |dy: &[f64]| -> Vec<ComplexMatrix> {
            let atdy = self.apply_adjoint(dy);
            (0..x.len())
                .map(|k| {
                    let mut d = r[k].clone();
                    d += &x[k].matmul(&atdy[k]).matmul(&zinv[k]);
                    d.hermitian_part()
                })
                .collect()
        };
        let mut dx = build_dx(&dy);
        // one round of refinement on A(ΔX) = r_p, which rounding erodes as μ → 0
        let adx = self.apply(&dx);
        let err: Vec<f64> = rp.iter().zip(&adx).map(|(p, a)| p - a).collect();
        if err.iter().any(|e| *e != 0.0) {
            let fix = cholesky_solve(factor, &err);
            for (d, f) in dy.iter_mut().zip(&fix) {
                *d += f;
            }
            dx = build_dx(&dy);
        }
        let atdy = self.apply_adjoint(&dy);
        let dz: Vec<ComplexMatrix> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
        Direction { dy, dz, dx }
    }
}

/// Largest `α` (capped at 1e6) with `m + α d ⪰ 0`, for `m ≻ 0`.
fn max_step(m: &ComplexMatrix, d: &ComplexMatrix) -> Option<f64> {
    let linv = m.cholesky().ok()?.lower_triangular_inverse();
    let t = linv.matmul(d).matmul(&linv.dagger()).hermitian_part();
    let lmin = herm_eig(&t).ok()?.min_eigenvalue();
    Some(if lmin < 0.0 { (-1.0 / lmin).min(1e6) } else { 1e6 })
}

fn step_lengths(x: &[ComplexMatrix], z: &[ComplexMatrix], dir: &Direction) -> Option<(f64, f64)> {
    let mut ap = 1.0_f64;
    let mut ad = 1.0_f64;
    for k in 0..x.len() {
        ap = ap.min(max_step(&x[k], &dir.dx[k])?);
        ad = ad.min(max_step(&z[k], &dir.dz[k])?);
    }
    Some((ap, ad))
}

/// Real dense Cholesky (row-major, lower factor). Adds a small diagonal shift
/// when the Schur complement has lost definiteness to rounding.
fn cholesky_regularized(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let max_diag = (0..n).fold(0.0_f64, |acc, i| acc.max(a[i * n + i].abs()));
    let mut shift = 0.0;
    for _ in 0..6 {
        if let Some(l) = cholesky(a, n, shift) {
            return Some(l);
        }
        shift = if shift == 0.0 { 1e-14 * max_diag.max(1e-300) } else { shift * 100.0 };
    }
    None
}

fn cholesky(a: &[f64], n: usize, shift: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j] + shift;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_are_orthonormal() {
        for n in 1..5 {
            let basis = hermitian_basis(n);
            assert_eq!(basis.len(), n * n);
            let traceless = traceless_basis(n);
            assert_eq!(traceless.len(), n * n - 1);
            for set in [&basis, &traceless] {
                for (i, a) in set.iter().enumerate() {
                    let ad = a.to_dense(n);
                    assert!(ad.is_hermitian(1e-15));
                    for (j, b) in set.iter().enumerate() {
                        let ip = b.inner(&ad);
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - expected).abs() < 1e-14);
                    }
                }
            }
            for t in &traceless {
                assert!(t.to_dense(n).trace().norm() < 1e-15);
            }
        }
    }

    #[test]
    fn largest_eigenvalue_as_lmi() {
        // max t s.t. A − t I ⪰ 0 gives λ_min(A); here maximize −t s.t. tI − A ⪰ 0.
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let mut lmi = Lmi::new(vec![2]);
        let t = lmi.add_var(-1.0);
        lmi.set_constant(0, -&a);
        lmi.add_term(t, 0, SparseHermitian::from_dense(&ComplexMatrix::identity(2)));
        let sol = lmi.solve(&SolverOptions::default(), None).unwrap();
        assert!(sol.converged);
        let expected = 1.5 + 0.5 * 5.0_f64.sqrt();
        assert!((sol.y[0] - expected).abs() < 1e-8, "{}", sol.y[0]);
        assert!((sol.bound + expected).abs() < 1e-8);
    }

    #[test]
    fn scalar_linear_program() {
        // max y1 + y2 s.t. y1 ≥ 0, y2 ≥ 0, 1 − y1 − 2 y2 ≥ 0, 1 − 2 y1 − y2 ≥ 0 → 2/3
        let one = |v: f64| SparseHermitian::new(vec![(0, 0, Complex64::new(v, 0.0))]);
        let mut lmi = Lmi::new(vec![1, 1, 1, 1]);
        let y1 = lmi.add_var(1.0);
        let y2 = lmi.add_var(1.0);
        lmi.add_term(y1, 0, one(1.0));
        lmi.add_term(y2, 1, one(1.0));
        lmi.set_constant(2, ComplexMatrix::identity(1));
        lmi.set_constant(3, ComplexMatrix::identity(1));
        lmi.add_term(y1, 2, one(-1.0));
        lmi.add_term(y2, 2, one(-2.0));
        lmi.add_term(y1, 3, one(-2.0));
        lmi.add_term(y2, 3, one(-1.0));
        let sol = lmi.solve(&SolverOptions::default(), None).unwrap();
        assert!(sol.converged);
        assert!((sol.objective - 2.0 / 3.0).abs() < 1e-8);
        assert!((sol.y[0] - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_empty_problem() {
        let lmi = Lmi::new(vec![2]);
        assert!(lmi.solve(&SolverOptions::default(), None).is_err());
    }
}
