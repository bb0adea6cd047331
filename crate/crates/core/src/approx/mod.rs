//! Optimal convex approximation of a target channel by mixtures of a given
//! set of channels, plus the closed-form distances and bounds available for
//! qubit unitaries and generalized damping channels.
//!
//! The objective `D(p) = ‖Φ − Σ_i p_i Ψ_i‖_⋄` is convex on the simplex. It is
//! minimized by Frank–Wolfe with away steps: each evaluation is one diamond
//! SDP whose witness `W` yields the subgradient `g_i = −Tr[R_{Ψ_i} W]` and,
//! through `min_i Tr[(R_Φ − R_{Ψ_i}) W]`, a certified lower bound on the
//! optimum. When the iteration stalls at a kink before its gap closes, the
//! minimization is finished by a single joint SDP over `(p, S₊, S₋)`.

mod closed_form;
mod simplex;

use std::collections::HashMap;

use crate::channels::{mix, tensor, Channel};
use crate::diamond::{diamond_of_choi_difference, diamond_sdp, DiamondResult, MIN_TOL};
use crate::error::{Error, Result};
use crate::qmat::{partial_trace, trace_norm, Factor};
use crate::sdp::{hermitian_basis, Lmi, SolverOptions, SparseHermitian};
use crate::ComplexMatrix;

pub use closed_form::{
    covariance_distance, covariance_distance_from_x, covariance_breakpoint, covariant_objective,
    damping_bound_f, damping_bound_f_printed, damping_bounds, pauli_distance_special, PauliSpecialCase,
};
pub use simplex::ProbabilityVector;

/// Largest set of available channels accepted by [`optimal_convex_approx`].
pub const MAX_SET_SIZE: usize = 8;
/// Frank–Wolfe stops once its duality gap is below this.
pub const FW_GAP_TOL: f64 = 1e-5;
pub const FW_MAX_ITER: usize = 500;
/// Golden-section line-search resolution on the step parameter.
pub const LINE_SEARCH_TOL: f64 = 1e-6;
const STALL_WINDOW: usize = 10;
const STALL_PROGRESS: f64 = 1e-4;

/// Optimal mixture and its certificates.
#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub weights: ProbabilityVector,
    /// `‖Φ − Σ p_i Ψ_i‖_⋄` at `weights`.
    pub distance: f64,
    /// `min_i ‖Φ − Ψ_i‖_⋄`.
    pub upper_bound_single: f64,
    /// `(1/d) min_p ‖R_Φ − Σ p_i R_{Ψ_i}‖₁`.
    pub lower_bound_choi: f64,
    /// Diamond certificate at `weights`.
    pub witness: DiamondResult,
    /// Frank–Wolfe iterations taken.
    pub iterations: usize,
    /// Upper bound on `distance − min_p D(p)`.
    pub optimality_gap: f64,
}

/// Memoized `D(p)` for a fixed target and set, keyed on weights rounded to 1e-9.
struct Objective {
    d: usize,
    tol: f64,
    target: ComplexMatrix,
    set: Vec<ComplexMatrix>,
    cache: HashMap<Vec<i64>, DiamondResult>,
}

impl Objective {
    fn new(target: ComplexMatrix, set: Vec<ComplexMatrix>, d: usize, tol: f64) -> Self {
        Self { d, tol, target, set, cache: HashMap::new() }
    }

    fn mixture_difference(&self, p: &ProbabilityVector) -> ComplexMatrix {
        let mut delta = self.target.clone();
        for (r, w) in self.set.iter().zip(p.as_slice()) {
            if *w != 0.0 {
                delta.axpy(-w, r);
            }
        }
        delta
    }

    fn eval(&mut self, p: &ProbabilityVector) -> Result<DiamondResult> {
        let key: Vec<i64> = p.as_slice().iter().map(|w| (w * 1e9).round() as i64).collect();
        if let Some(r) = self.cache.get(&key) {
            return Ok(r.clone());
        }
        let r = diamond_of_choi_difference(&self.mixture_difference(p), self.d, self.tol)?;
        self.cache.insert(key, r.clone());
        Ok(r)
    }

    /// `Tr[(R_Φ − R_{Ψ_i}) W]` for every vertex.
    fn vertex_values(&self, w: &ComplexMatrix) -> Vec<f64> {
        let base = self.target.re_trace_product(w);
        self.set.iter().map(|r| base - r.re_trace_product(w)).collect()
    }

    /// Golden-section search of `D` on the segment `[from, to]`.
    fn line_search(&mut self, from: &ProbabilityVector, to: &ProbabilityVector) -> Result<(ProbabilityVector, f64)> {
        let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let f = |s: &mut Self, t: f64| -> Result<(ProbabilityVector, f64)> {
            let p = from.lerp(to, t)?;
            let v = s.eval(&p)?.value;
            Ok((p, v))
        };
        let (mut a, mut b) = (0.0, 1.0);
        let mut c = b - inv_phi * (b - a);
        let mut e = a + inv_phi * (b - a);
        let mut fc = f(self, c)?;
        let mut fe = f(self, e)?;
        while b - a > LINE_SEARCH_TOL {
            if fc.1 <= fe.1 {
                b = e;
                e = c;
                fe = fc;
                c = b - inv_phi * (b - a);
                fc = f(self, c)?;
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + inv_phi * (b - a);
                fe = f(self, e)?;
            }
        }
        let mut best = if fc.1 <= fe.1 { fc } else { fe };
        for t in [0.0, 1.0] {
            let cand = f(self, t)?;
            if cand.1 < best.1 {
                best = cand;
            }
        }
        Ok(best)
    }
}

struct SimplexMinimum {
    weights: ProbabilityVector,
    witness: DiamondResult,
    iterations: usize,
    lower_certificate: f64,
}

fn validate_set(target: &Channel, set: &[Channel], tol: f64) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidChannel("empty set of available channels".into()));
    }
    if set.len() > MAX_SET_SIZE {
        return Err(Error::Range(format!("set size {} exceeds {MAX_SET_SIZE}", set.len())));
    }
    if set.iter().any(|c| c.dim() != target.dim()) {
        return Err(Error::DimMismatch("available channels differ in dimension from the target".into()));
    }
    if !(tol >= MIN_TOL) {
        return Err(Error::Range(format!("tolerance {tol} below {MIN_TOL}")));
    }
    Ok(())
}

/// Frank–Wolfe with away steps from the barycenter, completed by the joint
/// SDP when the gap does not close.
fn minimize_on_simplex(obj: &mut Objective) -> Result<SimplexMinimum> {
    let k = obj.set.len();
    let mut p = ProbabilityVector::uniform(k);
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut history = Vec::new();

    if k == 1 {
        let witness = obj.eval(&p)?;
        let lower_certificate = witness.primal;
        return Ok(SimplexMinimum { weights: p, witness, iterations, lower_certificate });
    }

    while iterations < FW_MAX_ITER {
        let current = obj.eval(&p)?;
        let t = obj.vertex_values(&current.witness_operator);
        let (s, t_min) = argmin(&t);
        lower = lower.max(t_min);
        if current.primal - t_min <= FW_GAP_TOL {
            converged = true;
            break;
        }
        iterations += 1;

        let fw_gain = current.primal - t_min;
        let away = (0..k)
            .filter(|&i| p[i] > 0.0 && p[i] < 1.0)
            .max_by(|&i, &j| t[i].total_cmp(&t[j]));
        let end = match away {
            Some(a) if t[a] - current.primal > fw_gain => {
                // move mass off vertex a: p + λ (p − e_a), λ ≤ p_a / (1 − p_a)
                let lmax = p[a] / (1.0 - p[a]);
                let w: Vec<f64> = (0..k)
                    .map(|i| {
                        let e = if i == a { 1.0 } else { 0.0 };
                        p[i] + lmax * (p[i] - e)
                    })
                    .collect();
                ProbabilityVector::normalized(&w)?
            }
            _ => ProbabilityVector::vertex(k, s),
        };
        let (next, value) = obj.line_search(&p, &end)?;
        // improvements within the evaluation accuracy are noise; slow
        // zigzagging between kinks is left to the joint program
        if value >= current.value - 2.0 * obj.tol {
            break;
        }
        history.push(value);
        if history.len() > STALL_WINDOW && history[history.len() - 1 - STALL_WINDOW] - value < STALL_PROGRESS {
            p = next;
            break;
        }
        p = next;
    }

    if !converged {
        if let Ok((pj, lj)) = joint_minimum(obj, BoundKind::Diamond) {
            lower = lower.max(lj);
            if obj.eval(&pj)?.value < obj.eval(&p)?.value {
                p = pj;
            }
        }
    }
    let witness = obj.eval(&p)?;
    Ok(SimplexMinimum { weights: p, witness, iterations, lower_certificate: lower })
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, x)| if x < best.1 { (i, x) } else { best })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BoundKind {
    /// Minimize the diamond distance.
    Diamond,
    /// Minimize `(1/d)‖R_Φ − Σ p_i R_i‖₁` (the reference state fixed to `I/d`).
    Choi,
}

/// Solves `min_p` of the chosen distance as one SDP:
///
/// ```text
/// minimize t  s.t.  S₋ ⪰ 0,  Δ(p) + S₋ ⪰ 0,  t I − Tr_out(Δ(p) + 2 S₋) ⪰ 0,  p ∈ simplex
/// ```
///
/// with `Δ(p) = R_Φ − Σ p_i R_i`. Returns the minimizing weights and a lower
/// bound on the minimum taken from the dual iterate.
fn joint_minimum(obj: &Objective, kind: BoundKind) -> Result<(ProbabilityVector, f64)> {
    let d = obj.d;
    let n = d * d;
    let k = obj.set.len();
    let last = &obj.set[k - 1];
    let c1 = &obj.target - last;
    let diffs: Vec<ComplexMatrix> = obj.set[..k - 1].iter().map(|r| r - last).collect();
    let out_dim = if kind == BoundKind::Diamond { d } else { 1 };
    let reduce = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
        Ok(match kind {
            BoundKind::Diamond => partial_trace(m, (d, d), Factor::First)?,
            BoundKind::Choi => ComplexMatrix::identity(1).scale_real(m.trace().re / d as f64),
        })
    };

    // blocks: S₋, Δ(p)+S₋, epigraph, p_i ≥ 0 (i < k−1), 1 − Σ p_i ≥ 0
    let mut dims = vec![n, n, out_dim];
    dims.extend(std::iter::repeat(1).take(k));
    let mut lmi = Lmi::new(dims);
    lmi.set_constant(1, c1.clone());
    lmi.set_constant(2, -&reduce(&c1)?);
    lmi.set_constant(3 + k - 1, ComplexMatrix::identity(1));

    let basis = hermitian_basis(n);
    let mut y0 = Vec::with_capacity(basis.len() + k);
    let shift = 1.0 + trace_norm(&c1)? + diffs.iter().map(|m| m.frobenius_norm()).sum::<f64>();
    for e in &basis {
        let v = lmi.add_var(0.0);
        lmi.add_term(v, 0, e.clone());
        lmi.add_term(v, 1, e.clone());
        lmi.add_term(v, 2, SparseHermitian::from_dense(&reduce(&e.to_dense(n))?.scale_real(-2.0)));
        let diagonal = e.entries().len() == 1;
        y0.push(if diagonal { shift } else { 0.0 });
    }
    let t = lmi.add_var(-1.0);
    lmi.add_term(t, 2, SparseHermitian::from_dense(&ComplexMatrix::identity(out_dim)));
    let one = SparseHermitian::from_dense(&ComplexMatrix::identity(1));
    for (i, diff) in diffs.iter().enumerate() {
        let v = lmi.add_var(0.0);
        lmi.add_term(v, 1, SparseHermitian::from_dense(&diff.scale_real(-1.0)));
        lmi.add_term(v, 2, SparseHermitian::from_dense(&reduce(diff)?));
        lmi.add_term(v, 3 + i, one.clone());
        lmi.add_term(v, 3 + k - 1, one.scaled(-1.0));
    }
    // strictly feasible start: barycentric p, S₋ = shift·I, t above the epigraph
    let pk = 1.0 / k as f64;
    let mut delta0 = c1.clone();
    for diff in &diffs {
        delta0.axpy(-pk, diff);
    }
    let mut s_total = delta0.clone();
    s_total.axpy(2.0 * shift, &ComplexMatrix::identity(n));
    let t0 = crate::qmat::herm_eig(&reduce(&s_total)?.hermitian_part())?.max_eigenvalue() + 1.0;
    y0.push(t0);
    y0.extend(std::iter::repeat(pk).take(k - 1));

    let opts = SolverOptions { gap_tol: obj.tol * 0.1, feas_tol: obj.tol * 0.1, ..SolverOptions::default() };
    let sol = lmi.solve(&opts, Some(&y0))?;
    let nb = basis.len();
    let mut w: Vec<f64> = sol.y[nb + 1..].to_vec();
    w.push(1.0 - w.iter().sum::<f64>());
    let weights = ProbabilityVector::normalized(&w)?;
    let lower = if sol.dual_residual <= 1e-6 { -sol.bound } else { f64::NEG_INFINITY };
    Ok((weights, lower))
}

/// Optimal convex approximation of `target` by mixtures of `set`.
pub fn optimal_convex_approx(target: &Channel, set: &[Channel], tol: f64) -> Result<ApproxResult> {
    validate_set(target, set, tol)?;
    let d = target.dim();
    let target_choi = target.choi().into_matrix();
    let set_chois: Vec<ComplexMatrix> = set.iter().map(|c| c.choi().into_matrix()).collect();
    let mut obj = Objective::new(target_choi, set_chois, d, tol);
    let found = minimize_on_simplex(&mut obj)?;

    let mut upper_bound_single = f64::INFINITY;
    for i in 0..set.len() {
        let r = obj.eval(&ProbabilityVector::vertex(set.len(), i))?;
        upper_bound_single = upper_bound_single.min(r.value);
    }
    let lower_bound_choi = if set.len() == 1 {
        trace_norm(&obj.mixture_difference(&found.weights))? / d as f64
    } else {
        let (pc, _) = joint_minimum(&obj, BoundKind::Choi)?;
        trace_norm(&obj.mixture_difference(&pc))? / d as f64
    };

    Ok(ApproxResult {
        distance: found.witness.value,
        optimality_gap: (found.witness.dual - found.lower_certificate).max(0.0),
        weights: found.weights,
        upper_bound_single,
        lower_bound_choi,
        witness: found.witness,
        iterations: found.iterations,
    })
}

/// Pauli approximation of a generalized damping channel.
#[derive(Clone, Debug)]
pub struct DampingApprox {
    pub approx: ApproxResult,
    pub lower: f64,
    pub upper: f64,
    /// `max(|p₁ − p₂|, p₃)`: distance of the optimal weights from the form `{1−2p, p, p, 0}`.
    pub form_deviation: f64,
}

/// Closest Pauli channel to `Γ(q, γ)` in diamond norm, with the analytic bounds.
pub fn pauli_distance_damping(q: f64, gamma: f64, tol: f64) -> Result<DampingApprox> {
    let (lower, upper) = damping_bounds(q, gamma)?;
    let target = crate::channels::damping(q, gamma)?;
    let approx = optimal_convex_approx(&target, &crate::channels::pauli_maps(), tol)?;
    let w = &approx.weights;
    let form_deviation = (w[1] - w[2]).abs().max(w[3]);
    Ok(DampingApprox { approx, lower, upper, form_deviation })
}

/// Best product mixture `(Σ p_i Ψ_i) ⊗ (Σ q_j Ψ_j)`.
#[derive(Clone, Debug)]
pub struct ProductApprox {
    pub distance: f64,
    pub first: ProbabilityVector,
    pub second: ProbabilityVector,
    pub witness: DiamondResult,
}

/// Two-copy approximation values, ordered `correlated ≤ product ≤ single_tensored`.
#[derive(Clone, Debug)]
pub struct MultiCopyResult {
    /// Optimal mixture over all `Ψ_i ⊗ Ψ_j`, indexed `i + k·j`.
    pub correlated: ApproxResult,
    pub product: ProductApprox,
    /// Single-copy optimum `p*` and `‖Φ⊗Φ − (Σ p*_i Ψ_i)^{⊗2}‖_⋄`.
    pub single: ApproxResult,
    pub single_tensored: DiamondResult,
}

/// `Ψ_i ⊗ Ψ_j` for all pairs, ordered with the first index running fastest.
pub fn pair_set(set: &[Channel]) -> Vec<Channel> {
    let mut out = Vec::with_capacity(set.len() * set.len());
    for b in set {
        for a in set {
            out.push(tensor(a, b));
        }
    }
    out
}

/// Compares correlated, product and tensored-single-copy approximations of
/// `target ⊗ target`.
pub fn multi_copy_approx(target: &Channel, single_set: &[Channel], copies: usize, tol: f64) -> Result<MultiCopyResult> {
    if copies != 2 {
        return Err(Error::Range(format!("only two copies are supported, got {copies}")));
    }
    validate_set(target, single_set, tol)?;
    let single = optimal_convex_approx(target, single_set, tol)?;
    let two = tensor(target, target);
    let single_mix = mix(single_set, &single.weights)?;
    let single_tensored = diamond_sdp(&two, &tensor(&single_mix, &single_mix), tol)?;

    let correlated = optimal_convex_approx(&two, &pair_set(single_set), tol)?;
    let product = product_minimum(&two, single_set, &single.weights, &single_tensored, tol)?;
    Ok(MultiCopyResult { correlated, product, single, single_tensored })
}

/// Alternating minimization over the two factors; each half-step is convex.
fn product_minimum(
    two: &Channel,
    set: &[Channel],
    start: &ProbabilityVector,
    start_value: &DiamondResult,
    tol: f64,
) -> Result<ProductApprox> {
    let d = two.dim();
    let target_choi = two.choi().into_matrix();
    let mut first = start.clone();
    let mut second = start.clone();
    let mut best = start_value.clone();
    for _round in 0..30 {
        let prev = best.value;
        for side in 0..2 {
            let fixed = mix(set, if side == 0 { &second } else { &first })?;
            let chois: Vec<ComplexMatrix> = set
                .iter()
                .map(|c| {
                    let pair = if side == 0 { tensor(c, &fixed) } else { tensor(&fixed, c) };
                    pair.choi().into_matrix()
                })
                .collect();
            let mut obj = Objective::new(target_choi.clone(), chois, d, tol);
            let found = minimize_on_simplex(&mut obj)?;
            if found.witness.value < best.value {
                best = found.witness;
                if side == 0 {
                    first = found.weights;
                } else {
                    second = found.weights;
                }
            }
        }
        if prev - best.value < 1e-8 {
            break;
        }
    }
    Ok(ProductApprox { distance: best.value, first, second, witness: best })
}

/// `{I, (1/3) Σ_i σ_i · σ_i}`, whose convex hull is the qubit covariant family.
pub fn covariant_set() -> Vec<Channel> {
    vec![
        Channel::identity(2),
        crate::channels::covariant(1.0, 2).expect("p = 1 is in range"),
    ]
}
