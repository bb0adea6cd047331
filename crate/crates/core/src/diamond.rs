//! Diamond-norm distances between channels.
//!
//! The general route is a semidefinite program over the Choi operators,
//!
//! ```text
//! maximize Tr[(R_a − R_b) W]  s.t.  −I⊗ρ ⪯ W ⪯ I⊗ρ,  ρ ⪰ 0,  Tr ρ = 1,
//! ```
//!
//! with `ρ` on the reference factor. Every result carries a feasible
//! `(ρ, W)` pair (a lower bound) and a repaired dual point (an upper bound).
//! Closed forms cover unitary pairs, and two cheap lower bounds (Choi trace
//! distance, fixed-input trace distance) are exposed for cross-checks.

use num_complex::Complex64;

use crate::channels::{Channel, ChoiMatrix};
use crate::error::{range_check, Error, Result};
use crate::qmat::{herm_eig, partial_trace, trace_norm, Factor};
use crate::sdp::{hermitian_basis, traceless_basis, Lmi, SolverOptions, SparseHermitian};
use crate::ComplexMatrix;

/// Largest channel dimension accepted by [`diamond_sdp`] (Choi operators up to 16×16).
pub const MAX_SDP_DIM: usize = 4;
/// Smallest tolerance accepted by [`diamond_sdp`].
pub const MIN_TOL: f64 = 1e-9;

/// Certified diamond-norm value.
#[derive(Clone, Debug)]
pub struct DiamondResult {
    pub value: f64,
    /// Density operator `ρ = ξ†ξ` on the reference factor.
    pub witness_state: ComplexMatrix,
    /// Hermitian `W` with `−I⊗ρ ⪯ W ⪯ I⊗ρ`.
    pub witness_operator: ComplexMatrix,
    /// `Tr[(R_a − R_b) W]`, a lower bound.
    pub primal: f64,
    /// Dual objective of a feasible dual point, an upper bound.
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Eigenvalue polygon of a unitary and its distance from the origin.
#[derive(Clone, Debug)]
pub struct PolygonRadius {
    pub vertices: Vec<Complex64>,
    pub r: f64,
}

impl PolygonRadius {
    /// Distance from 0 to the convex hull of points on the unit circle.
    ///
    /// If every point lies on an arc of angular width `w < π`, the closest
    /// hull point is the midpoint of the chord closing that arc and
    /// `r = cos(w/2)`; otherwise the hull contains the origin.
    pub fn from_vertices(vertices: Vec<Complex64>) -> Self {
        let mut angles: Vec<f64> = vertices.iter().map(|z| z.arg()).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let n = angles.len();
        let mut max_gap = 0.0_f64;
        for i in 0..n {
            let next = if i + 1 < n { angles[i + 1] } else { angles[0] + 2.0 * std::f64::consts::PI };
            max_gap = max_gap.max(next - angles[i]);
        }
        let width = 2.0 * std::f64::consts::PI - max_gap;
        let r = if width < std::f64::consts::PI { (width / 2.0).cos() } else { 0.0 };
        Self { vertices, r: r.clamp(0.0, 1.0) }
    }

    /// Polygon of the eigenvalues of the unitary `u`.
    pub fn of_unitary(u: &ComplexMatrix) -> Result<Self> {
        Ok(Self::from_vertices(unitary_eigenvalues(u)?))
    }
}

/// Eigenvalues of a unitary (normal) matrix, via a generic Hermitian
/// combination of its real and imaginary parts.
fn unitary_eigenvalues(u: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = u.rows();
    let re = u.hermitian_part();
    let im = (u - &u.dagger()).scale(Complex64::new(0.0, -0.5));
    for mix in [0.618_033_988_749_895, 0.267_949_192_431_123, 1.414_213_562_373_095] {
        let mut k = re.clone();
        k.axpy(mix, &im);
        let eig = herm_eig(&k.hermitian_part())?;
        let mut vals = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let v = eig.eigenvectors.column(j);
            let uv = u.matvec(&v);
            let lambda: Complex64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
            let resid: f64 = uv.iter().zip(&v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
            if resid > 1e-8 {
                ok = false;
                break;
            }
            vals.push(lambda / lambda.norm());
        }
        if ok {
            return Ok(vals);
        }
    }
    Err(Error::NoConvergence("unitary eigenvalues".into()))
}

/// `‖𝒱 − 𝒵‖_⋄ = 2√(1 − r(Z†V)²)` for unitary channels.
pub fn diamond_unitary(v: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    for m in [v, z] {
        let defect = m.unitary_defect();
        if !(defect <= 1e-9) {
            return Err(Error::NotUnitary(defect));
        }
    }
    if v.rows() != z.rows() {
        return Err(Error::DimMismatch(format!("unitaries of size {} and {}", v.rows(), z.rows())));
    }
    let w = z.dagger().matmul(v);
    let r = if w.rows() == 2 {
        (0.5 * w.trace().norm()).min(1.0)
    } else {
        PolygonRadius::of_unitary(&w)?.r
    };
    Ok(2.0 * (1.0 - r * r).max(0.0).sqrt())
}

/// Diamond distance of `𝒰(α, β, δ)` from the identity, `2(1 − cos²α cos²β)^{1/2}`.
pub fn d_i_unitary(alpha: f64, beta: f64) -> Result<f64> {
    range_check("alpha", alpha, -1e-12, std::f64::consts::FRAC_PI_2 + 1e-12)?;
    range_check("beta", beta, -1e-12, 2.0 * std::f64::consts::PI + 1e-12)?;
    let cc = alpha.cos().powi(2) * beta.cos().powi(2);
    Ok(2.0 * (1.0 - cc).max(0.0).sqrt())
}

fn same_dim(a: &Channel, b: &Channel) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!("channels of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(a.dim())
}

/// `(1/d)‖R_a − R_b‖₁`, a lower bound on `‖a − b‖_⋄`.
pub fn choi_trace_distance(a: &Channel, b: &Channel) -> Result<f64> {
    let d = same_dim(a, b)?;
    let diff = a.choi().matrix() - b.choi().matrix();
    Ok(trace_norm(&diff)? / d as f64)
}

fn check_density(state: &ComplexMatrix, d: usize) -> Result<()> {
    if state.rows() != d || state.cols() != d {
        return Err(Error::InvalidState(format!("expected a {d}x{d} operator")));
    }
    if !state.is_hermitian(1e-9) {
        return Err(Error::InvalidState("not Hermitian".into()));
    }
    if (state.trace().re - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!("trace {}", state.trace().re)));
    }
    let lmin = herm_eig(state)?.min_eigenvalue();
    if lmin < -1e-8 {
        return Err(Error::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
    }
    Ok(())
}

/// `‖(a − b)(state)‖₁`, the distinguishability achieved without an ancilla.
pub fn fixed_input_bound(a: &Channel, b: &Channel, state: &ComplexMatrix) -> Result<f64> {
    let d = same_dim(a, b)?;
    check_density(state, d)?;
    trace_norm(&(&a.apply(state) - &b.apply(state)))
}

/// Optimal single-shot discrimination probability `1/2 + ‖Φ₀ − Φ₁‖_⋄ / 4`.
pub fn discrimination_probability(diamond_value: f64) -> Result<f64> {
    range_check("diamond value", diamond_value, 0.0, 2.0)?;
    Ok(0.5 + 0.25 * diamond_value)
}

/// Certified diamond distance between two channels.
pub fn diamond_sdp(a: &Channel, b: &Channel, tol: f64) -> Result<DiamondResult> {
    let d = same_dim(a, b)?;
    let delta = a.choi().matrix() - b.choi().matrix();
    diamond_of_choi_difference(&delta, d, tol)
}

/// Diamond norm of the Hermiticity-preserving map whose Choi operator is
/// `delta` (for instance `R_a − R_b`).
pub fn diamond_of_choi_difference(delta: &ComplexMatrix, d: usize, tol: f64) -> Result<DiamondResult> {
    if d > MAX_SDP_DIM {
        return Err(Error::DimTooLarge { dim: d, max: MAX_SDP_DIM });
    }
    if delta.rows() != d * d || !delta.is_square() {
        return Err(Error::DimMismatch(format!("Choi operator is not {0}x{0}", d * d)));
    }
    if !(tol >= MIN_TOL) {
        return Err(Error::Range(format!("tolerance {tol} below {MIN_TOL}")));
    }
    let delta = delta.hermitian_part();
    let problem = DiamondProgram::new(&delta, d);

    let mut last = None;
    for shrink in [0.05, 1e-3] {
        let opts = SolverOptions {
            gap_tol: tol * shrink,
            feas_tol: tol * shrink,
            ..SolverOptions::default()
        };
        let sol = problem.lmi.solve(&opts, None)?;
        let result = problem.certify(&delta, &sol.y, &sol.x, sol.iterations)?;
        if result.gap <= tol {
            return Ok(result);
        }
        last = Some(result);
    }
    let gap = last.map_or(f64::NAN, |r| r.gap);
    Err(Error::NoConvergence(format!("diamond SDP gap {gap:.3e} above tolerance {tol:.1e}")))
}

/// The diamond SDP in LMI form: variables are the coordinates of `W` in an
/// orthonormal Hermitian basis and of `ρ − I/d` in a traceless basis.
struct DiamondProgram {
    d: usize,
    w_basis: Vec<SparseHermitian>,
    rho_basis: Vec<SparseHermitian>,
    lmi: Lmi,
}

impl DiamondProgram {
    fn new(delta: &ComplexMatrix, d: usize) -> Self {
        let n = d * d;
        let w_basis = hermitian_basis(n);
        let rho_basis = traceless_basis(d);
        // blocks: I⊗ρ − W, I⊗ρ + W, ρ
        let mut lmi = Lmi::new(vec![n, n, d]);
        let scale = 1.0 / d as f64;
        lmi.set_constant(0, ComplexMatrix::identity(n).scale_real(scale));
        lmi.set_constant(1, ComplexMatrix::identity(n).scale_real(scale));
        lmi.set_constant(2, ComplexMatrix::identity(d).scale_real(scale));
        for e in &w_basis {
            let v = lmi.add_var(e.inner(delta));
            lmi.add_term(v, 0, e.scaled(-1.0));
            lmi.add_term(v, 1, e.clone());
        }
        for g in &rho_basis {
            let v = lmi.add_var(0.0);
            let lifted = g.lift_to_second_factor(d, d);
            lmi.add_term(v, 0, lifted.clone());
            lmi.add_term(v, 1, lifted);
            lmi.add_term(v, 2, g.clone());
        }
        Self { d, w_basis, rho_basis, lmi }
    }

    /// Turns a solver iterate into rigorous lower and upper bounds.
    fn certify(&self, delta: &ComplexMatrix, y: &[f64], x: &[ComplexMatrix], iterations: usize) -> Result<DiamondResult> {
        let d = self.d;
        let n = d * d;
        let nw = self.w_basis.len();

        // Primal side: (ρ, W), shifted into the feasible set if rounding left
        // it marginally outside.
        let mut w = ComplexMatrix::zeros(n, n);
        for (e, &yi) in self.w_basis.iter().zip(&y[..nw]) {
            e.add_to(&mut w, yi);
        }
        let mut rho = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        for (g, &yi) in self.rho_basis.iter().zip(&y[nw..]) {
            g.add_to(&mut rho, yi);
        }
        let rho = rho.hermitian_part();
        let w = w.hermitian_part();
        let lifted = crate::qmat::kron(&ComplexMatrix::identity(d), &rho);
        let mut viol = 0.0_f64;
        for m in [&lifted - &w, &lifted + &w, rho.clone()] {
            viol = viol.max(-herm_eig(&m)?.min_eigenvalue());
        }
        let (rho, w) = if viol > 0.0 {
            let mut r = rho.clone();
            r.axpy(viol, &ComplexMatrix::identity(d));
            let s = 1.0 / (1.0 + d as f64 * viol);
            (r.scale_real(s), w.scale_real(s))
        } else {
            (rho, w)
        };
        let primal = delta.re_trace_product(&w);

        // Dual side: S₊ − S₋ = Δ exactly, both PSD.
        let residual = &(delta - &x[0]) + &x[1];
        let eig = herm_eig(&residual.hermitian_part())?;
        let mut s_plus = x[0].clone();
        s_plus += &eig.map_spectrum(|l| l.max(0.0));
        let mut s_minus = &s_plus - delta;
        let shift = (-herm_eig(&s_plus.hermitian_part())?.min_eigenvalue())
            .max(-herm_eig(&s_minus.hermitian_part())?.min_eigenvalue())
            .max(0.0);
        if shift > 0.0 {
            s_plus.axpy(shift, &ComplexMatrix::identity(n));
            s_minus.axpy(shift, &ComplexMatrix::identity(n));
        }
        let marginal = partial_trace(&(&s_plus + &s_minus), (d, d), Factor::First)?;
        let dual = herm_eig(&marginal.hermitian_part())?.max_eigenvalue();

        let value = (0.5 * (primal + dual)).clamp(0.0, 2.0);
        Ok(DiamondResult {
            value,
            witness_state: rho,
            witness_operator: w,
            primal,
            dual,
            gap: dual - primal,
            iterations,
        })
    }
}

/// `‖(I⊗ξ) Δ (I⊗ξ†)‖₁` with `ξ = √ρ`: the distinguishability achieved by
/// the input `(I⊗ξ)|η⟩` for a given reference state.
pub fn witness_value(delta: &ComplexMatrix, state: &ComplexMatrix) -> Result<f64> {
    let d = state.rows();
    let xi = herm_eig(&state.hermitian_part())?.map_spectrum(|l| l.max(0.0).sqrt());
    let lift = crate::qmat::kron(&ComplexMatrix::identity(d), &xi);
    trace_norm(&lift.matmul(delta).matmul(&lift.dagger()).hermitian_part())
}

/// Convenience: the Choi difference `R_a − R_b`.
pub fn choi_difference(a: &ChoiMatrix, b: &ChoiMatrix) -> ComplexMatrix {
    a.matrix() - b.matrix()
}
