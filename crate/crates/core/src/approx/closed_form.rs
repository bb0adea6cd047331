use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::ProbabilityVector;
use crate::diamond::d_i_unitary;
use crate::error::{range_check, Result};

const SLACK: f64 = 1e-12;

/// `x` where the middle and last branches of the covariant distance meet,
/// `((15 + √33)/6)^{1/2}`.
pub fn covariance_breakpoint() -> f64 {
    ((15.0 + 33.0_f64.sqrt()) / 6.0).sqrt()
}

/// `(2/3) p + ((16/9) p² + (1 − (4/3) p) x²)^{1/2}`: diamond distance between a
/// unitary at distance `x` from the identity and the covariant channel `C_p`.
pub fn covariant_objective(x: f64, p: f64) -> Result<f64> {
    range_check("x", x, -SLACK, 2.0 + SLACK)?;
    range_check("p", p, -SLACK, 4.0 / 3.0 + SLACK)?;
    let r = 16.0 / 9.0 * p * p + (1.0 - 4.0 / 3.0 * p) * x * x;
    Ok(2.0 / 3.0 * p + r.max(0.0).sqrt())
}

/// Minimum of [`covariant_objective`] over `p ∈ [0, 1]` as `(value, p_opt)`.
pub fn covariance_distance_from_x(x: f64) -> Result<(f64, f64)> {
    range_check("x", x, -SLACK, 2.0 + SLACK)?;
    let x = x.clamp(0.0, 2.0);
    let x2 = x * x;
    if x <= 1.0 {
        Ok((x, 0.0))
    } else if x <= covariance_breakpoint() {
        let root = (3.0 * x2 * (4.0 - x2)).max(0.0).sqrt();
        Ok((0.25 * (x2 + root), 0.125 * (3.0 * x2 - root)))
    } else {
        Ok(((2.0 + (16.0 - 3.0 * x2).max(0.0).sqrt()) / 3.0, 1.0))
    }
}

/// Distance of `U(α, β, ·)` from the convex hull of the identity and the
/// completely depolarizing-type covariant channel.
pub fn covariance_distance(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    covariance_distance_from_x(d_i_unitary(alpha, beta)?)
}

/// One-parameter families of qubit unitaries with a closed-form Pauli distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliSpecialCase {
    /// `U(α, 0, 0)`, parameter `α`.
    Real,
    /// `U(0, β, ·)`, parameter `β`.
    Diagonal,
    /// `U(π/2, ·, δ)`, parameter `δ`.
    AntiDiagonal,
}

/// `(|sin 2θ|, weights)` for the Pauli approximation of a special-case unitary.
pub fn pauli_distance_special(kind: PauliSpecialCase, angle: f64) -> Result<(f64, ProbabilityVector)> {
    let hi = if kind == PauliSpecialCase::Real { FRAC_PI_2 } else { 2.0 * PI };
    range_check("angle", angle, -SLACK, hi + SLACK)?;
    let (s, c) = angle.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let w = match kind {
        PauliSpecialCase::Real => vec![c2, 0.0, s2, 0.0],
        PauliSpecialCase::Diagonal => vec![c2, 0.0, 0.0, s2],
        PauliSpecialCase::AntiDiagonal => vec![0.0, s2, c2, 0.0],
    };
    Ok(((2.0 * angle).sin().abs(), ProbabilityVector::normalized(&w)?))
}

fn damping_f_with(q: f64, gamma: f64, coefficient: f64) -> Result<f64> {
    range_check("q", q, 0.0, 1.0)?;
    range_check("gamma", gamma, 0.0, 1.0)?;
    let s = (1.0 - gamma).sqrt();
    let r = 8.0 * (1.0 - gamma) - 4.0 * coefficient * s + gamma * gamma * (2.0 - 4.0 * q * (1.0 - q));
    Ok(r.max(0.0).sqrt())
}

/// `f(q, γ) = {8(1−γ) − 4(2−γ)√(1−γ) + γ²[2 − 4q(1−q)]}^{1/2}`, so that
/// `½[γ|1−2q| + f] = ‖Γ(q,γ) − P_γ‖_⋄` with `P_γ` the Pauli channel of
/// weights `(1 − γ/2, γ/4, γ/4, 0)`.
pub fn damping_bound_f(q: f64, gamma: f64) -> Result<f64> {
    damping_f_with(q, gamma, 2.0 - gamma)
}

/// The same expression with `4(2−q)√(1−γ)` in place of `4(2−γ)√(1−γ)`. It does
/// not bound the distance; kept for comparison.
pub fn damping_bound_f_printed(q: f64, gamma: f64) -> Result<f64> {
    damping_f_with(q, gamma, 2.0 - q)
}

/// `(γ|1−2q|, ½[γ|1−2q| + f(q,γ)])`, bracketing the Pauli distance of `Γ(q, γ)`.
pub fn damping_bounds(q: f64, gamma: f64) -> Result<(f64, f64)> {
    let f = damping_bound_f(q, gamma)?;
    let lower = gamma * (1.0 - 2.0 * q).abs();
    Ok((lower, 0.5 * (lower + f)))
}
