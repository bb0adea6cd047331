mod common;

use chanapprox::approx::{
    covariance_distance, covariant_set, damping_bounds, optimal_convex_approx, pauli_distance_damping,
    pauli_distance_special, PauliSpecialCase, ProbabilityVector,
};
use chanapprox::channels::{compose, mix, pauli, pauli_maps, unitary_qubit, Channel};
use chanapprox::diamond::diamond_sdp;
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-7;

fn random_set(rng: &mut impl Rng, k: usize) -> Vec<Channel> {
    (0..k)
        .map(|_| {
            let kraus = rng.gen_range(1..4);
            common::random_channel(rng, 2, kraus)
        })
        .collect()
}

fn mixture_distance(target: &Channel, set: &[Channel], w: &[f64]) -> f64 {
    let m = mix(set, &ProbabilityVector::new(w.to_vec()).unwrap()).unwrap();
    diamond_sdp(target, &m, TOL).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn bounds_bracket_the_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let target = common::random_channel(&mut rng, 2, 2);
        let k = rng.gen_range(2..5);
        let set = random_set(&mut rng, k);
        let r = optimal_convex_approx(&target, &set, TOL).unwrap();
        prop_assert!(r.lower_bound_choi <= r.distance + TOL, "{} > {}", r.lower_bound_choi, r.distance);
        prop_assert!(r.distance <= r.upper_bound_single + TOL);
        prop_assert!(r.witness.gap <= TOL);
        prop_assert!(r.optimality_gap <= 1e-5, "optimality gap {}", r.optimality_gap);
        // no sampled mixture beats the optimum
        for _ in 0..5 {
            let w = common::random_simplex(&mut rng, k);
            prop_assert!(r.distance <= mixture_distance(&target, &set, &w) + TOL);
        }
    }

    #[test]
    fn objective_is_convex_on_the_simplex(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = common::rng(seed);
        let target = common::random_channel(&mut rng, 2, 2);
        let set = random_set(&mut rng, 3);
        let p = common::random_simplex(&mut rng, 3);
        let q = common::random_simplex(&mut rng, 3);
        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let lhs = mixture_distance(&target, &set, &mid);
        let rhs = lambda * mixture_distance(&target, &set, &p) + (1.0 - lambda) * mixture_distance(&target, &set, &q);
        prop_assert!(lhs <= rhs + 2.0 * TOL, "{} > {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn pauli_distance_symmetries(alpha in 0.0f64..std::f64::consts::FRAC_PI_2, beta in 0.0f64..6.28, delta in 0.0f64..6.28) {
        let set = pauli_maps();
        let base = optimal_convex_approx(&unitary_qubit(alpha, beta, delta).unwrap(), &set, TOL).unwrap().distance;
        for (a, b, d) in common::symmetry_images(alpha, beta, delta) {
            let other = optimal_convex_approx(&unitary_qubit(a, b, d).unwrap(), &set, TOL).unwrap().distance;
            prop_assert!((base - other).abs() <= 2.0 * TOL, "({}, {}, {}) -> ({}, {}, {}): {} vs {}", alpha, beta, delta, a, b, d, base, other);
        }
    }

    #[test]
    fn pauli_post_processing_permutes_weights(alpha in 0.05f64..1.5, beta in 0.05f64..1.5, k in 1usize..4) {
        // σ_k σ_i ∝ σ_{k xor i}
        let set = pauli_maps();
        let target = unitary_qubit(alpha, beta, 0.0).unwrap();
        let moved = compose(&Channel::unitary(pauli(k)).unwrap(), &target).unwrap();
        let r0 = optimal_convex_approx(&target, &set, TOL).unwrap();
        let r1 = optimal_convex_approx(&moved, &set, TOL).unwrap();
        prop_assert!((r0.distance - r1.distance).abs() <= 2.0 * TOL);
        for i in 0..4 {
            prop_assert!((r0.weights[i] - r1.weights[k ^ i]).abs() < 1e-3, "{:?} vs {:?}", r0.weights, r1.weights);
        }
    }

    #[test]
    fn covariant_family_distance_matches_closed_form(alpha in 0.0f64..std::f64::consts::FRAC_PI_2, beta in 0.0f64..6.28, delta in 0.0f64..6.28) {
        let (closed, _) = covariance_distance(alpha, beta).unwrap();
        let r = optimal_convex_approx(&unitary_qubit(alpha, beta, delta).unwrap(), &covariant_set(), TOL).unwrap();
        prop_assert!((r.distance - closed).abs() < 1e-6, "{} vs {}", r.distance, closed);
    }
}

#[test]
fn special_cases_match_closed_forms() {
    let set = pauli_maps();
    for (kind, angle, (a, b, d)) in [
        (PauliSpecialCase::Real, 0.4, (0.4, 0.0, 0.0)),
        (PauliSpecialCase::Diagonal, 2.2, (0.0, 2.2, 0.0)),
        (PauliSpecialCase::AntiDiagonal, 4.0, (std::f64::consts::FRAC_PI_2, 0.0, 4.0)),
    ] {
        let (v, w) = pauli_distance_special(kind, angle).unwrap();
        let r = optimal_convex_approx(&unitary_qubit(a, b, d).unwrap(), &set, TOL).unwrap();
        assert!((r.distance - v).abs() < 1e-6, "{kind:?}: {} vs {v}", r.distance);
        assert!(r.weights.max_abs_diff(&w) < 1e-3, "{kind:?}: {:?} vs {:?}", r.weights, w);
    }
}

#[test]
fn damping_weights_on_the_xy_axes_exceed_a_quarter_gamma() {
    for i in 0..9 {
        for j in 0..9 {
            let (q, g) = (i as f64 / 8.0, j as f64 / 8.0);
            let r = pauli_distance_damping(q, g, TOL).unwrap();
            let w = &r.approx.weights;
            assert!(w[1] >= g / 4.0 - 1e-3 && w[2] >= g / 4.0 - 1e-3, "q={q} g={g}: {w:?}");
            assert!(r.lower - 2.0 * TOL <= r.approx.distance && r.approx.distance <= r.upper + 2.0 * TOL);
        }
    }
}

#[test]
fn damping_bound_function_is_a_distance() {
    // ½[γ|1−2q| + f] is the distance to the Pauli channel (1 − γ/2, γ/4, γ/4, 0)
    for (q, g) in [(0.7, 0.5), (0.1, 0.9), (1.0, 0.3), (0.5, 1.0), (0.3, 0.0)] {
        let w = vec![1.0 - g / 2.0, g / 4.0, g / 4.0, 0.0];
        let ch = chanapprox::channels::pauli_channel(&ProbabilityVector::new(w).unwrap()).unwrap();
        let d = diamond_sdp(&chanapprox::channels::damping(q, g).unwrap(), &ch, TOL).unwrap().value;
        let (_, upper) = damping_bounds(q, g).unwrap();
        assert!((d - upper).abs() < 1e-6, "q={q} g={g}: {d} vs {upper}");
    }
}
