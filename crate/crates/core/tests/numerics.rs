mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use quantum_effects::numerics::random::{effect, hermitian, projection, vector};
use quantum_effects::numerics::{
    eig_sym, inner, is_projection, is_psd, loewner_leq, oplus, orthosupplement, prop6_identity_check, sharp_witness,
    sqrt_psd, Effect, HermitianMatrix, Matrix, Projection, Tolerances,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn two_by_two_eigenvalues_match_closed_form() {
    let mut r = rng(1);
    for _ in 0..200 {
        let [a, b, d]: [f64; 3] = std::array::from_fn(|_| rand::Rng::gen_range(&mut r, -2.0..2.0));
        let m = HermitianMatrix::from_real_rows(&[&[a, b], &[b, d]], &Tolerances::default()).unwrap();
        let e = eig_sym(&m).unwrap();
        let (lo, hi) = common::eig2(a, b, d);
        assert!((e.values[0] - lo).abs() < 1e-12 && (e.values[1] - hi).abs() < 1e-12);
    }
}

#[test]
fn loewner_examples() {
    let t = Tolerances::default();
    let half = HermitianMatrix::diagonal(&[0.5, 0.5]);
    let id = HermitianMatrix::identity(2);
    assert!(loewner_leq(&half, &id, &t).unwrap());
    assert!(!loewner_leq(&id, &half, &t).unwrap());
    // incomparable: diag(1, 0) and diag(0, 1)
    let p = HermitianMatrix::diagonal(&[1.0, 0.0]);
    let q = HermitianMatrix::diagonal(&[0.0, 1.0]);
    assert!(!loewner_leq(&p, &q, &t).unwrap() && !loewner_leq(&q, &p, &t).unwrap());
}

#[test]
fn projections_are_sharp_effects() {
    let t = Tolerances::default();
    let mut r = rng(2);
    for _ in 0..50 {
        let p = projection(&mut r, 4);
        assert!(sharp_witness(p.as_effect(), &t).unwrap().is_none());
        let e = effect(&mut r, 4);
        if !is_projection(&e, &t) {
            let w = sharp_witness(&e, &t).unwrap().unwrap();
            assert!(loewner_leq(w.as_hermitian(), e.as_hermitian(), &t).unwrap());
            assert!(loewner_leq(w.as_hermitian(), orthosupplement(&e).as_hermitian(), &t).unwrap());
        }
    }
}

#[test]
fn oplus_is_partial() {
    let t = Tolerances::default();
    let a = Effect::scalar(2, 0.6);
    assert!(oplus(&a, &a, &t).unwrap().is_none());
    let s = oplus(&a, &orthosupplement(&a), &t).unwrap().unwrap();
    assert!((s.as_matrix() - &Matrix::identity(2)).frobenius_norm() < 1e-15);
}

#[test]
fn strong_residual_identity_on_rank_one_pairs() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let p = Projection::onto(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let q = Projection::onto(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
    let x = [Complex64::new(0.3, -0.2), Complex64::new(1.0, 0.5)];
    assert!(prop6_identity_check(&p, &q, &x).unwrap() < 1e-14);
}

fn dim_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=16, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_decomposition_reconstructs((dim, seed) in dim_and_seed()) {
        let m = hermitian(&mut rng(seed), dim);
        let e = eig_sym(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        let rebuilt = e.reconstruct_with(|l| l);
        prop_assert!((&rebuilt - m.as_matrix()).frobenius_norm() <= 1e-10 * scale);
        let gram = &e.vectors.adjoint() * &e.vectors;
        prop_assert!((&gram - &Matrix::identity(dim)).frobenius_norm() <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        // trace is the eigenvalue sum
        let trace: f64 = (0..dim).map(|i| m.as_matrix()[(i, i)].re).sum();
        prop_assert!((trace - e.values.iter().sum::<f64>()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn psd_square_root((dim, seed) in dim_and_seed()) {
        let t = Tolerances::default();
        let e = effect(&mut rng(seed), dim);
        let root = sqrt_psd(e.as_hermitian(), &t).unwrap();
        let r = root.as_matrix();
        prop_assert!((&(r * r) - e.as_matrix()).frobenius_norm() <= 1e-10);
        prop_assert!((&(r * e.as_matrix()) - &(e.as_matrix() * r)).frobenius_norm() <= 1e-10);
        prop_assert!(is_psd(&root, &t).unwrap());
    }

    #[test]
    fn effects_lie_between_zero_and_identity((dim, seed) in dim_and_seed(), xs in any::<u64>()) {
        let t = Tolerances::default();
        let e = effect(&mut rng(seed), dim);
        prop_assert!(loewner_leq(&HermitianMatrix::zeros(dim), e.as_hermitian(), &t).unwrap());
        prop_assert!(loewner_leq(e.as_hermitian(), &HermitianMatrix::identity(dim), &t).unwrap());
        let x = vector(&mut rng(xs), dim);
        let q = e.as_hermitian().quadratic_form(&x);
        let n2 = inner(&x, &x).re;
        prop_assert!(q >= -1e-12 && q <= n2 + 1e-12);
    }

    #[test]
    fn loewner_is_transitive((dim, seed) in (1usize..=6, any::<u64>())) {
        let t = Tolerances::default();
        let mut r = rng(seed);
        let a = effect(&mut r, dim);
        let b = effect(&mut r, dim);
        let c = effect(&mut r, dim);
        // a/3 <= (a + b)/3 <= (a + b + c)/3
        let x = a.as_hermitian().scale(1.0 / 3.0);
        let y = x.try_add(&b.as_hermitian().scale(1.0 / 3.0)).unwrap();
        let z = y.try_add(&c.as_hermitian().scale(1.0 / 3.0)).unwrap();
        prop_assert!(loewner_leq(&x, &y, &t).unwrap() && loewner_leq(&y, &z, &t).unwrap() && loewner_leq(&x, &z, &t).unwrap());
    }

    #[test]
    fn strong_residual_identity_holds((dim, seed) in (2usize..=8, any::<u64>())) {
        let mut r = rng(seed);
        let p = projection(&mut r, dim);
        let q = projection(&mut r, dim);
        let x = vector(&mut r, dim);
        prop_assert!(prop6_identity_check(&p, &q, &x).unwrap() <= 1e-10);
    }
}
