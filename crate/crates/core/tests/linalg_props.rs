mod common;

use common::{gaussian, lin_comb, opnorm, rng, sparse};
use opalg::linalg::{op_norm, orthonormalize, random_unitary, sqrt_psd};
use opalg::ToleranceConfig;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reorthonormalizing_is_the_identity(rows in 1usize..=4, cols in 1usize..=4, k in 1usize..=5, seed: u64) {
        let tol = ToleranceConfig::default();
        let mut r = rng(seed);
        let mats: Vec<_> = (0..k).map(|_| sparse(rows, cols, &mut r)).collect();
        let s = orthonormalize(rows, cols, &mats, &tol).unwrap();
        let again = orthonormalize(rows, cols, s.basis(), &tol).unwrap();
        prop_assert_eq!(again.dim(), s.dim());
        prop_assert!(s.gram_defect() <= tol.eq_tol);
        for b in s.basis() {
            prop_assert!(again.residual(b) <= tol.eq_tol);
        }
        for m in &mats {
            prop_assert!(s.residual(m) <= tol.eq_tol * (1.0 + m.norm()));
        }
    }

    #[test]
    fn membership_ignores_the_choice_of_basis(n in 2usize..=4, k in 1usize..=4, inside: bool, seed: u64) {
        let tol = ToleranceConfig::default();
        let mut r = rng(seed);
        let mats: Vec<_> = (0..k).map(|_| sparse(n, n, &mut r)).collect();
        let s = orthonormalize(n, n, &mats, &tol).unwrap();
        let t = s.recombined(&random_unitary(s.dim(), seed ^ 1));
        let x = if inside { lin_comb(s.basis(), &mut r) } else { gaussian(n, n, seed ^ 2) };
        prop_assert_eq!(s.contains(&x, &tol).unwrap(), t.contains(&x, &tol).unwrap());
        if inside {
            prop_assert!(t.contains(&x, &tol).unwrap());
        }
    }

    #[test]
    fn psd_square_root_squares_back(n in 1usize..=8, rank in 1usize..=8, seed: u64) {
        let tol = ToleranceConfig::default();
        let g = gaussian(n, rank.min(n), seed);
        let x = &g * g.adjoint();
        let root = sqrt_psd(&x, &tol).unwrap();
        prop_assert!((&root * &root - &x).norm() <= 10.0 * tol.eq_tol * (1.0 + x.norm()));
        prop_assert!((&root - root.adjoint()).norm() <= 10.0 * tol.eq_tol * (1.0 + root.norm()));
    }

    #[test]
    fn op_norm_is_submultiplicative_and_unitarily_invariant(n in 1usize..=6, seed: u64) {
        let a = gaussian(n, n, seed);
        let b = gaussian(n, n, seed ^ 7);
        let (na, nb) = (op_norm(&a), op_norm(&b));
        prop_assert!(op_norm(&(&a * &b)) <= na * nb * (1.0 + 1e-12));
        let u = random_unitary(n, seed ^ 3);
        let v = random_unitary(n, seed ^ 5);
        prop_assert!((op_norm(&(&u * &a * &v)) - na).abs() <= 1e-10 * (1.0 + na));
        prop_assert!((na - opnorm(&a)).abs() <= 1e-10 * (1.0 + na));
    }
}
