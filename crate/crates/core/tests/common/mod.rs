#![allow(dead_code)]

use chanapprox::channels::Channel;
use chanapprox::qmat::herm_eig;
use chanapprox::ComplexMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..d {
        let mut v = g.column(j);
        for u in &cols {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / n).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

pub fn random_state(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let rho = g.matmul(&g.dagger());
    let t = rho.trace().re;
    rho.scale_real(1.0 / t)
}

/// `K_k = G_k S^{-1/2}` with `S = Σ G_k†G_k`.
pub fn random_channel(rng: &mut impl Rng, d: usize, kraus: usize) -> Channel {
    let gs: Vec<ComplexMatrix> = (0..kraus).map(|_| random_matrix(rng, d, d)).collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for g in &gs {
        s += &g.dagger().matmul(g);
    }
    let inv_sqrt = herm_eig(&s.hermitian_part()).unwrap().map_spectrum(|l| 1.0 / l.sqrt());
    Channel::new(d, gs.iter().map(|g| g.matmul(&inv_sqrt)).collect()).unwrap()
}

pub fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -rng.gen_range(f64::EPSILON..1.0).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// `(I⊗X) Δ (I⊗X†)` on `out ⊗ ref`.
fn conjugate_reference(delta: &ComplexMatrix, x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let lift = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r / d == c / d {
            x[(r % d, c % d)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    lift.matmul(delta).matmul(&lift.dagger())
}

fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    herm_eig(&m.hermitian_part()).unwrap().eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Lower bound on `‖Δ‖_⋄` by alternating maximization over inputs
/// `(I⊗X)|η⟩`, `Tr X†X = 1`: `Y = sign((I⊗X)Δ(I⊗X†))`, then `vec X` becomes
/// the top eigenvector of the quadratic form `x ↦ Tr[Y (I⊗X)Δ(I⊗X†)]`.
pub fn alternating_diamond_lower(delta: &ComplexMatrix, d: usize, rng: &mut impl Rng, restarts: usize) -> f64 {
    let n = d * d;
    let mut best = 0.0_f64;
    for _ in 0..restarts {
        let mut x = random_matrix(rng, d, d);
        let f = x.frobenius_norm();
        x = x.scale_real(1.0 / f);
        let mut value = trace_norm_hermitian(&conjugate_reference(delta, &x, d));
        for _ in 0..200 {
            let m = conjugate_reference(delta, &x, d).hermitian_part();
            let y = herm_eig(&m).unwrap().map_spectrum(|l| if l >= 0.0 { 1.0 } else { -1.0 });
            // K[(b,e),(a,c)] = Σ_{i,j} Y[(j,b),(i,a)] Δ[(i,c),(j,e)]
            let k = ComplexMatrix::from_fn(n, n, |row, col| {
                let (b, e) = (row / d, row % d);
                let (a, c) = (col / d, col % d);
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        s += y[(j * d + b, i * d + a)] * delta[(i * d + c, j * d + e)];
                    }
                }
                s
            });
            let eig = herm_eig(&k.hermitian_part()).unwrap();
            let top = eig.eigenvectors.column(0);
            x = ComplexMatrix::from_fn(d, d, |a, c| top[a * d + c]);
            let next = trace_norm_hermitian(&conjugate_reference(delta, &x, d));
            if next <= value + 1e-13 {
                value = value.max(next);
                break;
            }
            value = next;
        }
        best = best.max(value);
    }
    best
}

/// Distance from 0 to the convex hull of points in the plane, by brute force
/// over vertices, edges and triangles.
pub fn hull_distance_brute(points: &[Complex64]) -> f64 {
    let n = points.len();
    let inside = |a: Complex64, b: Complex64, c: Complex64| {
        let cross = |p: Complex64, q: Complex64| p.re * q.im - p.im * q.re;
        let s1 = cross(b - a, -a);
        let s2 = cross(c - b, -b);
        let s3 = cross(a - c, -c);
        (s1 >= -1e-12 && s2 >= -1e-12 && s3 >= -1e-12) || (s1 <= 1e-12 && s2 <= 1e-12 && s3 <= 1e-12)
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if inside(points[i], points[j], points[k]) {
                    return 0.0;
                }
            }
        }
    }
    let mut best = points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let ab = b - a;
            let t = (-(a.re * ab.re + a.im * ab.im) / ab.norm_sqr()).clamp(0.0, 1.0);
            best = best.min((a + ab * t).norm());
        }
    }
    best
}

/// Angle reduced into `[0, 2π]`.
pub fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

/// Images of `(α, β, δ)` under the Pauli-distance symmetries:
/// `β → π/2 ± β`, `δ → π/2 ± δ` and `(α, β, δ) → (π/2 − α, δ, β)`.
pub fn symmetry_images(alpha: f64, beta: f64, delta: f64) -> [(f64, f64, f64); 5] {
    use std::f64::consts::FRAC_PI_2;
    [
        (alpha, wrap(FRAC_PI_2 + beta), delta),
        (alpha, wrap(FRAC_PI_2 - beta), delta),
        (alpha, beta, wrap(FRAC_PI_2 + delta)),
        (alpha, beta, wrap(FRAC_PI_2 - delta)),
        (FRAC_PI_2 - alpha, delta, beta),
    ]
}
