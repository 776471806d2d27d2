mod common;

use common::{conjugate, lin_comb, opnorm, polynomial_family, rng, unit_plus_nilpotent};
use opalg::algebra::{
    commutator_subspace, is_commutative, is_ideal, is_nilpotent, is_three_commutative, quotient, radical, verify_algebra,
    wedderburn_split, MatrixAlgebra, WedderburnSplit,
};
use opalg::examples::{corpus, random_triangular_algebra};
use opalg::{CMatrix, ToleranceConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn sample(kind: u8, n: usize, seed: u64, tol: &ToleranceConfig) -> MatrixAlgebra {
    match kind % 3 {
        0 => conjugate(&random_triangular_algebra(n, 4, seed, tol).unwrap(), seed, tol),
        1 => polynomial_family(n, seed, tol),
        _ => unit_plus_nilpotent(1 + (seed % 2) as usize, n, seed, tol),
    }
}

fn scale(a: &MatrixAlgebra) -> f64 {
    a.basis().iter().map(opnorm).fold(0.0, f64::max)
}

fn product(xs: &[CMatrix]) -> CMatrix {
    xs.iter().skip(1).fold(xs[0].clone(), |acc, x| acc * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutator_annihilates_three_commutative_algebras(kind: u8, n in 3usize..=5, seed: u64) {
        let tol = ToleranceConfig::default();
        let a = sample(kind, n, seed, &tol);
        if is_three_commutative(&a, &tol) {
            let c = commutator_subspace(&a, &tol).unwrap();
            let s = scale(&a);
            for x in c.basis() {
                for y in a.basis() {
                    prop_assert!(opnorm(&(x * y)) <= 10.0 * tol.eq_tol * (1.0 + s));
                    prop_assert!(opnorm(&(y * x)) <= 10.0 * tol.eq_tol * (1.0 + s));
                }
            }
        }
    }

    #[test]
    fn long_products_commute_in_three_commutative_algebras(kind: u8, n in 3usize..=5, len in 4usize..=5, seed: u64) {
        let tol = ToleranceConfig::default();
        let a = sample(kind, n, seed, &tol);
        prop_assume!(is_three_commutative(&a, &tol));
        let mut r = rng(seed ^ 11);
        let xs: Vec<CMatrix> = (0..len).map(|_| lin_comb(a.basis(), &mut r)).collect();
        let mut ys = xs.clone();
        ys.shuffle(&mut r);
        let (p, q) = (product(&xs), product(&ys));
        let size = xs.iter().map(opnorm).product::<f64>();
        prop_assert!(opnorm(&(p - q)) <= 1e-8 * (1.0 + size));
    }

    #[test]
    fn radical_is_a_nilpotent_ideal_with_semisimple_quotient(kind: u8, n in 3usize..=5, seed: u64) {
        let tol = ToleranceConfig::default();
        let a = sample(kind, n, seed, &tol);
        let rad = radical(&a, &tol).unwrap();
        prop_assert!(is_ideal(&rad, &a, &tol).unwrap());
        if rad.dim() > 0 {
            let r_alg = verify_algebra(&rad, &tol).unwrap();
            prop_assert!(is_nilpotent(&r_alg, &tol).unwrap());
            let mut r = rng(seed ^ 5);
            let x = lin_comb(rad.basis(), &mut r);
            let mut p = x.clone();
            for _ in 0..a.dim() {
                p = &p * &x;
            }
            prop_assert!(opnorm(&p) <= 1e-8 * (1.0 + opnorm(&x)).powi(a.dim() as i32 + 1));
        }
        if rad.dim() < a.dim() {
            let (_, q) = quotient(&a, &rad, &tol).unwrap();
            let rep = q.regular_representation(&tol).unwrap();
            prop_assert_eq!(radical(&rep, &tol).unwrap().dim(), 0);
        }
    }

    #[test]
    fn wedderburn_pieces_annihilate(k in 1usize..=2, m in 2usize..=4, seed: u64) {
        let tol = ToleranceConfig::default();
        let a = unit_plus_nilpotent(k, m, seed, &tol);
        match wedderburn_split(&a, &tol).unwrap() {
            WedderburnSplit::Split { c, k: nil, f } => {
                prop_assert_eq!(c.dim() + nil.dim(), a.dim());
                let s = 10.0 * tol.eq_tol * (1.0 + scale(&a));
                for x in c.basis() {
                    prop_assert!(opnorm(&(&f * x - x)) <= s && opnorm(&(x * &f - x)) <= s);
                    for y in nil.basis() {
                        prop_assert!(opnorm(&(x * y)) <= s && opnorm(&(y * x)) <= s);
                    }
                }
                prop_assert!(nil.dim() == 0 || is_nilpotent(&nil, &tol).unwrap());
                prop_assert!(is_commutative(&c, &tol));
            }
            WedderburnSplit::RadicalOnly => prop_assert!(false, "sample has a unit summand"),
        }
    }

    #[test]
    fn commutative_implies_three_commutative(n in 2usize..=5, seed: u64) {
        let tol = ToleranceConfig::default();
        let a = polynomial_family(n, seed, &tol);
        prop_assert!(is_commutative(&a, &tol));
        prop_assert!(is_three_commutative(&a, &tol));
    }
}

#[test]
fn corpus_three_commutative_entries_have_annihilating_commutators() {
    let tol = ToleranceConfig::default();
    for entry in corpus(&tol).unwrap() {
        let a = &entry.algebra;
        if !is_three_commutative(a, &tol) {
            continue;
        }
        let c = commutator_subspace(a, &tol).unwrap();
        let worst = c
            .basis()
            .iter()
            .flat_map(|x| a.basis().iter().map(move |y| opnorm(&(x * y)).max(opnorm(&(y * x)))))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{}: {worst:.1e}", entry.name);
    }
}

#[test]
fn full_matrix_algebra_is_semisimple() {
    let tol = ToleranceConfig::default();
    let a = verify_algebra(&opalg::Subspace::full(3, 3), &tol).unwrap();
    assert_eq!(radical(&a, &tol).unwrap().dim(), 0);
    assert!(!is_three_commutative(&a, &tol));
}
