mod common;

use common::{gaussian, opnorm, rng, sparse};
use opalg::cb::{is_complete_isometry, FeasibilityStatus};
use opalg::examples::{anticommuting_family, corner_projection, ex1};
use opalg::linalg::{direct_sum, orthonormalize, random_unitary};
use opalg::reversibility::envelope_kp;
use opalg::tro::{block_decompose, generate_tro, standard_position_embed, support_projections};
use opalg::{CMatrix, Subspace, ToleranceConfig};
use proptest::prelude::*;

/// Spans whose generated TRO has one or two rectangular blocks in rotated coordinates.
fn block_input(shapes: &[(usize, usize)], extra: usize, seed: u64, tol: &ToleranceConfig) -> Subspace {
    let m: usize = shapes.iter().map(|s| s.0).sum();
    let n: usize = shapes.iter().map(|s| s.1).sum();
    let u = random_unitary(m, seed);
    let v = random_unitary(n, seed ^ 3);
    let mut r = rng(seed ^ 5);
    let mut mats = Vec::new();
    for k in 0..shapes.len() + extra {
        let parts: Vec<CMatrix> = shapes
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| if k == j || k >= shapes.len() { sparse(a, b, &mut r) } else { CMatrix::zeros(a, b) })
            .collect();
        let refs: Vec<&CMatrix> = parts.iter().collect();
        mats.push(&u * direct_sum(&refs) * &v);
    }
    orthonormalize(m, n, &mats, tol).unwrap()
}

fn shapes_strategy() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((1usize..=2, 1usize..=3), 1..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generating_twice_changes_nothing(rows in 1usize..=4, cols in 1usize..=4, k in 1usize..=3, seed: u64) {
        let tol = ToleranceConfig::default();
        let mut r = rng(seed);
        let mats: Vec<_> = (0..k).map(|_| sparse(rows, cols, &mut r)).collect();
        let s = orthonormalize(rows, cols, &mats, &tol).unwrap();
        let t = generate_tro(&s, &tol).unwrap();
        let again = generate_tro(t.space(), &tol).unwrap();
        prop_assert!(again.space().same_as(t.space(), &tol));
        prop_assert!(s.is_subspace_of(t.space(), &tol));
    }

    #[test]
    fn support_projections_are_projections(shapes in shapes_strategy(), extra in 0usize..=1, seed: u64) {
        let tol = ToleranceConfig::default();
        let s = block_input(&shapes, extra, seed, &tol);
        let w = generate_tro(&s, &tol).unwrap();
        let (p, q) = support_projections(w.space(), &tol).unwrap();
        let e = 10.0 * tol.eq_tol;
        prop_assert!(opnorm(&(&p * &p - &p)) <= e && opnorm(&(&p - p.adjoint())) <= e);
        prop_assert!(opnorm(&(&q * &q - &q)) <= e && opnorm(&(&q - q.adjoint())) <= e);
        for x in w.basis() {
            prop_assert!(opnorm(&(&p * x * &q - x)) <= e);
        }
    }

    #[test]
    fn block_decomposition_round_trips(shapes in shapes_strategy(), extra in 0usize..=1, seed: u64) {
        let tol = ToleranceConfig::default();
        let s = block_input(&shapes, extra, seed, &tol);
        let w = generate_tro(&s, &tol).unwrap();
        let bs = block_decompose(&w, &tol).unwrap();
        let e = 10.0 * tol.eq_tol;
        let blocks: Vec<CMatrix> = bs.block_bases.iter().flat_map(|b| b.basis().to_vec()).collect();
        let (m, n) = w.shape();
        let rebuilt = orthonormalize(m, n, &blocks, &tol).unwrap();
        prop_assert!(rebuilt.same_as(w.space(), &tol));
        for x in w.basis() {
            let mut sum = CMatrix::zeros(m, n);
            for (ek, fk) in bs.left_projections.iter().zip(&bs.right_projections) {
                sum += ek * x * fk;
            }
            prop_assert!(opnorm(&(sum - x)) <= e * (1.0 + opnorm(x)));
        }
        let dims: usize = bs.blocks.iter().map(|b| b.n * b.m).sum();
        prop_assert_eq!(dims, w.dim());
    }
}

#[test]
fn ex1_support_projections_commute() {
    let tol = ToleranceConfig::default();
    let a = ex1(&tol).unwrap();
    let w = generate_tro(a.space(), &tol).unwrap();
    let (p, q) = support_projections(w.space(), &tol).unwrap();
    assert!(opnorm(&(&p * &q - &q * &p)) <= 1e-12);
    let pq = &p * &q;
    assert!(opnorm(&(&pq * &pq - &pq)) <= 1e-12);
    assert!(opnorm(&(pq - corner_projection(2))) <= 1e-12);
}

#[test]
fn standard_position_embedding_is_completely_isometric() {
    let tol = ToleranceConfig::default();
    for a in [ex1(&tol).unwrap(), anticommuting_family(1, &tol).unwrap()] {
        let ek = envelope_kp(&a, &tol).unwrap();
        let phi = standard_position_embed(&ek.envelope, &ek.z.element, &tol).unwrap();
        let out = is_complete_isometry(&phi, &tol).unwrap();
        assert_eq!(out.status, FeasibilityStatus::Feasible);
        // and Φ respects the product of A
        let imgs: Vec<CMatrix> = ek.basis.iter().map(|x| phi.apply(x, &tol).unwrap()).collect();
        for (i, x) in ek.basis.iter().enumerate() {
            for (j, y) in ek.basis.iter().enumerate() {
                let want = phi.apply(&(x * y), &tol).unwrap();
                assert!(opnorm(&(&imgs[i] * &imgs[j] - want)) <= 1e-9);
            }
        }
    }
}

#[test]
fn one_generator_splits_along_singular_values() {
    let tol = ToleranceConfig::default();
    // the TRO of a single x is spanned by the rank-one pieces of its SVD
    let s = orthonormalize(3, 2, &[gaussian(3, 2, 1)], &tol).unwrap();
    let w = generate_tro(&s, &tol).unwrap();
    assert_eq!(w.dim(), 2);
    assert_eq!(block_decompose(&w, &tol).unwrap().shapes(), vec![(1, 1), (1, 1)]);
    let two = orthonormalize(3, 2, &[gaussian(3, 2, 1), gaussian(3, 2, 2)], &tol).unwrap();
    assert_eq!(generate_tro(&two, &tol).unwrap().dim(), 6);
}
