//! Quantum channels in Kraus form and their Choi operators.
//!
//! Choi operators use the (output ⊗ reference) factor ordering: the channel
//! acts on the first tensor factor of the unnormalized maximally entangled
//! vector `|η⟩ = Σ_n |n⟩⊗|n⟩`, so `Tr R = d` and tracing out the output
//! factor of a trace-preserving channel's Choi operator leaves `I_d`.

mod doc;

use num_complex::Complex64;

use crate::approx::ProbabilityVector;
use crate::error::{range_check, Error, Result};
use crate::qmat::{kron, partial_trace, Factor};
use crate::ComplexMatrix;

pub use doc::ChannelSpec;

/// Tolerance on `‖Σ K†K − I‖_F` accepted by [`Channel::new`].
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Two channels are considered equal when their Choi operators are this close
/// in Frobenius norm.
pub const CHOI_EQ_TOL: f64 = 1e-8;

/// Completely positive trace-preserving map on `d`-dimensional operators,
/// held as a list of Kraus operators.
#[derive(Clone, Debug)]
pub struct Channel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Choi operator `R_Φ = (Φ ⊗ I)|η⟩⟨η|` on the `d²`-dimensional doubled space.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Frobenius distance between two Choi operators.
    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).frobenius_norm()
    }
}

impl Channel {
    /// Validates dimensions and the completeness relation `Σ K†K = I`.
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidChannel("dimension must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::DimMismatch(format!(
                "Kraus operator is {}x{}, expected {dim}x{dim}",
                k.rows(),
                k.cols()
            )));
        }
        let ch = Self { dim, kraus };
        let defect = ch.completeness_defect();
        if !(defect <= COMPLETENESS_TOL) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// The unitary channel `ρ ↦ U ρ U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NonSquare { rows: u.rows(), cols: u.cols() });
        }
        let defect = u.unitary_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { dim: u.rows(), kraus: vec![u] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ_k K_k† K_k − I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum += &k.dagger().matmul(k);
        }
        (&sum - &ComplexMatrix::identity(self.dim)).frobenius_norm()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += &k.matmul(rho).matmul(&k.dagger());
        }
        out
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi(self)
    }

    /// Channel equality up to the choice of Kraus representation.
    pub fn approx_eq(&self, other: &Channel) -> bool {
        self.dim == other.dim && self.choi().distance(&other.choi()) <= CHOI_EQ_TOL
    }
}

/// `R = Σ_k (K_k ⊗ I)|η⟩⟨η|(K_k ⊗ I)†`, i.e. `R[(i,n),(j,m)] = Σ_k K_k[i,n] conj(K_k[j,m])`.
pub fn choi(ch: &Channel) -> ChoiMatrix {
    let d = ch.dim;
    let mut r = ComplexMatrix::zeros(d * d, d * d);
    for k in &ch.kraus {
        // (K ⊗ I)|η⟩ has entry K[i,n] at index i*d + n
        let v: Vec<Complex64> = (0..d * d).map(|idx| k[(idx / d, idx % d)]).collect();
        r += &ComplexMatrix::outer(&v, &v);
    }
    ChoiMatrix { dim: d, matrix: r }
}

/// Pauli matrix `σ_i`, with `σ_0 = I`.
pub fn pauli(i: usize) -> ComplexMatrix {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let z = c(0.0, 0.0);
    let entries = match i {
        0 => [c(1.0, 0.0), z, z, c(1.0, 0.0)],
        1 => [z, c(1.0, 0.0), c(1.0, 0.0), z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [c(1.0, 0.0), z, z, c(-1.0, 0.0)],
        _ => panic!("Pauli index {i} out of range"),
    };
    ComplexMatrix::from_vec(2, 2, entries.to_vec()).expect("2x2 Pauli")
}

/// The four Pauli conjugation maps `ρ ↦ σ_i ρ σ_i`, `i = 0..4`.
pub fn pauli_maps() -> Vec<Channel> {
    (0..4).map(|i| Channel { dim: 2, kraus: vec![pauli(i)] }).collect()
}

/// The qubit unitary
/// `U(α,β,δ) = [[cos α e^{iβ}, sin α e^{iδ}], [−sin α e^{−iδ}, cos α e^{−iβ}]]`.
pub fn qubit_unitary_matrix(alpha: f64, beta: f64, delta: f64) -> Result<ComplexMatrix> {
    let eps = 1e-12;
    range_check("alpha", alpha, -eps, std::f64::consts::FRAC_PI_2 + eps)?;
    range_check("beta", beta, -eps, 2.0 * std::f64::consts::PI + eps)?;
    range_check("delta", delta, -eps, 2.0 * std::f64::consts::PI + eps)?;
    let (s, c) = alpha.sin_cos();
    let e = |phi: f64| Complex64::from_polar(1.0, phi);
    ComplexMatrix::from_vec(
        2,
        2,
        vec![e(beta) * c, e(delta) * s, -e(-delta) * s, e(-beta) * c],
    )
}

pub fn unitary_qubit(alpha: f64, beta: f64, delta: f64) -> Result<Channel> {
    Ok(Channel { dim: 2, kraus: vec![qubit_unitary_matrix(alpha, beta, delta)?] })
}

/// Traceless, mutually orthogonal unitaries completing `I` to a basis:
/// the Pauli matrices for `d = 2`, clock-and-shift products `X^a Z^b` otherwise.
pub fn orthogonal_unitary_basis(d: usize) -> Vec<ComplexMatrix> {
    if d == 2 {
        return (1..4).map(pauli).collect();
    }
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let shift = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let clock = ComplexMatrix::diag(&(0..d).map(omega).collect::<Vec<_>>());
    let power = |m: &ComplexMatrix, e: usize| {
        (0..e).fold(ComplexMatrix::identity(d), |acc, _| acc.matmul(m))
    };
    let mut out = Vec::with_capacity(d * d - 1);
    for a in 0..d {
        for b in 0..d {
            if a == 0 && b == 0 {
                continue;
            }
            out.push(power(&shift, a).matmul(&power(&clock, b)));
        }
    }
    out
}

/// `C_p(ρ) = (1−p)ρ + p/(d²−1)·(d Tr[ρ] I − ρ)`, the SU(d)-covariant family.
pub fn covariant(p: f64, d: usize) -> Result<Channel> {
    range_check("p", p, 0.0, 1.0)?;
    if d < 2 {
        return Err(Error::Range(format!("covariant channel needs d >= 2, got {d}")));
    }
    let mut kraus = Vec::with_capacity(d * d);
    if p < 1.0 {
        kraus.push(ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        let w = (p / (d * d - 1) as f64).sqrt();
        kraus.extend(orthogonal_unitary_basis(d).iter().map(|v| v.scale_real(w)));
    }
    Ok(Channel { dim: d, kraus })
}

/// `ρ ↦ Σ_i p_i σ_i ρ σ_i`.
pub fn pauli_channel(p: &ProbabilityVector) -> Result<Channel> {
    if p.len() != 4 {
        return Err(Error::SimplexViolation(format!(
            "Pauli channel needs 4 weights, got {}",
            p.len()
        )));
    }
    mix(&pauli_maps(), p)
}

/// Generalized amplitude damping `Γ(q, γ)` with Kraus operators
/// `√q A_γ`, `√q C_γ`, `√(1−q) B_γ`, `√(1−q) C_γ†`.
pub fn damping(q: f64, gamma: f64) -> Result<Channel> {
    range_check("q", q, 0.0, 1.0)?;
    range_check("gamma", gamma, 0.0, 1.0)?;
    let s = (1.0 - gamma).sqrt();
    let a = ComplexMatrix::diag_real(&[1.0, s]);
    let b = ComplexMatrix::diag_real(&[s, 1.0]);
    let c = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
    let cd = c.dagger();
    let kraus: Vec<ComplexMatrix> = [(q, &a), (q, &c), (1.0 - q, &b), (1.0 - q, &cd)]
        .into_iter()
        .filter(|(w, k)| *w > 0.0 && k.max_abs() > 0.0)
        .map(|(w, k)| k.scale_real(w.sqrt()))
        .collect();
    Channel::new(2, kraus)
}

/// Convex mixture `Σ_i p_i Ψ_i`, as the union of the scaled Kraus sets.
pub fn mix(chs: &[Channel], p: &ProbabilityVector) -> Result<Channel> {
    let first = chs
        .first()
        .ok_or_else(|| Error::InvalidChannel("mixture of no channels".into()))?;
    if chs.len() != p.len() {
        return Err(Error::SimplexViolation(format!(
            "{} weights for {} channels",
            p.len(),
            chs.len()
        )));
    }
    let d = first.dim;
    if chs.iter().any(|c| c.dim != d) {
        return Err(Error::DimMismatch("mixed channels have different dimensions".into()));
    }
    let kraus = chs
        .iter()
        .zip(p.as_slice())
        .filter(|(_, w)| **w > 0.0)
        .flat_map(|(c, w)| c.kraus.iter().map(move |k| k.scale_real(w.sqrt())))
        .collect();
    Ok(Channel { dim: d, kraus })
}

/// `a ⊗ b` acting on the composite system (a's factor first).
pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|ka| b.kraus.iter().map(move |kb| kron(ka, kb)))
        .collect();
    Channel { dim: a.dim * b.dim, kraus }
}

/// `outer ∘ inner`.
pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
    if outer.dim != inner.dim {
        return Err(Error::DimMismatch(format!(
            "cannot compose d={} after d={}",
            outer.dim, inner.dim
        )));
    }
    let kraus = outer
        .kraus
        .iter()
        .flat_map(|ko| inner.kraus.iter().map(move |ki| ko.matmul(ki)))
        .collect();
    Ok(Channel { dim: outer.dim, kraus })
}

/// Tracing the output factor of a valid Choi operator gives `I_d`.
pub fn reference_marginal(c: &ChoiMatrix) -> ComplexMatrix {
    partial_trace(&c.matrix, (c.dim, c.dim), Factor::First).expect("Choi operator is d²×d²")
}
