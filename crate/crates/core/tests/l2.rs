mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use quantum_effects::l2::examples::{example3_contradiction, example5_lower_bound_check};
use quantum_effects::l2::squeeze::{
    prescribed_squeeze_families, squeeze_sot_check, squeeze_test_vectors, vigier_check,
};
use quantum_effects::l2::{norm_distance, sot_residual, test_vectors, wot_residual, OperatorFamily, SparseVector};
use quantum_effects::numerics::Tolerances;

fn sparse(pairs: &[(usize, f64, f64)]) -> SparseVector {
    SparseVector::from_pairs(pairs.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))))
}

#[test]
fn families_are_idempotent() {
    let vectors = test_vectors(3);
    for fam in OperatorFamily::ALL {
        for n in (1..=10_000).step_by(97).chain([1, 2, 10_000]) {
            for x in &vectors {
                let once = fam.apply(n, x).unwrap();
                let twice = fam.apply(n, &once).unwrap();
                assert!(twice.sub(&once).norm() <= 1e-8, "{fam:?} n = {n}");
            }
        }
    }
}

#[test]
fn action_stays_on_named_coordinates() {
    let x = sparse(&[(0, 1.0, 0.0), (1, 0.5, 0.5), (2, -1.0, 0.0), (3, 0.0, 2.0), (7, 1.0, 1.0)]);
    for n in 1..20 {
        let allowed = OperatorFamily::Example4.operator(n).unwrap().coords().to_vec();
        let y = OperatorFamily::Example4.apply(n, &x).unwrap();
        assert!(y.support().all(|k| allowed.contains(&k)));
        assert!(OperatorFamily::Example3.apply(n, &x).unwrap().support().all(|k| k <= 1));
        assert!(OperatorFamily::Example5.apply(n, &x).unwrap().support().all(|k| k == 1 || k == 2));
    }
}

/// `P_n - P_0` for the rotated rank-one families is
/// `[[cos^2 t - 1, s c], [s c, sin^2 t]]`; its largest absolute eigenvalue is `sin t`.
#[test]
fn norm_distance_matches_two_by_two_oracle() {
    for n in 1..=1000 {
        let t = 1.0 / n as f64;
        let (s, c) = t.sin_cos();
        let (lo, hi) = common::eig2(c * c - 1.0, s * c, s * s);
        let oracle = lo.abs().max(hi.abs());
        for fam in [OperatorFamily::Example3, OperatorFamily::Example5] {
            let got = norm_distance(fam, n).unwrap();
            assert!((got - oracle).abs() <= 1e-12, "{fam:?} {n}");
            assert!((got - s).abs() <= 1e-10);
        }
    }
}

#[test]
fn example4_weak_pairing_is_one_half_against_moving_basis_vector() {
    let e1 = SparseVector::basis(1);
    for n in 2..200 {
        let w = wot_residual(OperatorFamily::Example4, n, &e1, &SparseVector::basis(n)).unwrap();
        assert_eq!(w, 0.5);
    }
}

#[test]
fn example3_determinant_oracle() {
    for n in [1usize, 2, 7, 100, 1000] {
        for c in [0.0, 0.25, 0.5, 0.999] {
            let t = 1.0 / n as f64;
            let (s, co) = t.sin_cos();
            let (a, b, d) = (1.0 - co * co, -s * co, c - s * s);
            let det = a * d - b * b;
            let check = example3_contradiction(n, c).unwrap();
            assert!((check.determinant - det).abs() <= 1e-12);
            let (lo, _) = common::eig2(a, b, d);
            assert!((check.min_eigenvalue - lo).abs() <= 1e-12);
            assert!(check.holds());
        }
    }
}

#[test]
fn example5_determinant_oracle() {
    for n in [1usize, 3, 50, 1000] {
        for r in [1e-6, 0.01, 1.0] {
            let (s, co) = (1.0 / n as f64).sin_cos();
            let (lo, _) = common::eig2(co * co - r, s * co, s * s);
            let check = example5_lower_bound_check(n, r).unwrap();
            assert!((check.min_eigenvalue - lo).abs() <= 1e-12);
            assert!(lo < 0.0 && check.holds());
        }
    }
}

#[test]
fn prescribed_scenarios_pass_both_checks() {
    let tol = Tolerances::default();
    for sf in prescribed_squeeze_families() {
        let v = squeeze_test_vectors(sf.dim, 0);
        assert!(vigier_check(&sf, 1000, &v, 1e-6, &tol).unwrap().passed, "{}", sf.name);
        assert!(squeeze_sot_check(&sf, 1000, &v, 1e-6, &tol).unwrap().passed, "{}", sf.name);
    }
}

fn sparse_vector() -> impl Strategy<Value = SparseVector> {
    proptest::collection::vec((0usize..12, -1.0f64..1.0, -1.0f64..1.0), 0..5)
        .prop_map(|v| SparseVector::from_pairs(v.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im)))))
}

fn family() -> impl Strategy<Value = OperatorFamily> {
    prop_oneof![Just(OperatorFamily::Example3), Just(OperatorFamily::Example4), Just(OperatorFamily::Example5)]
}

proptest! {
    #[test]
    fn weak_residual_is_bounded_by_strong(fam in family(), n in 1usize..5000, x in sparse_vector(), y in sparse_vector()) {
        let w = wot_residual(fam, n, &x, &y).unwrap();
        let s = sot_residual(fam, n, &x).unwrap();
        prop_assert!(w <= s * y.norm() + 1e-12);
    }

    #[test]
    fn projections_are_contractions(fam in family(), n in 1usize..5000, x in sparse_vector()) {
        let y = fam.apply(n, &x).unwrap();
        prop_assert!(y.norm() <= x.norm() + 1e-12);
        // self-adjoint: (P x, x) is real
        prop_assert!(y.inner(&x).im.abs() <= 1e-12);
    }

    #[test]
    fn example4_weak_residual_vanishes_past_support(x in sparse_vector(), y in sparse_vector(), extra in 1usize..1000) {
        let n = x.max_coordinate().unwrap_or(0).max(y.max_coordinate().unwrap_or(0)) + extra;
        prop_assert_eq!(wot_residual(OperatorFamily::Example4, n.max(2), &x, &y).unwrap(), 0.0);
    }
}
