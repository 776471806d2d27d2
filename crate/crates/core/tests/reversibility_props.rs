mod common;

use std::sync::OnceLock;

use common::{conjugate, opnorm, rng};
use nalgebra::DMatrix;
use opalg::algebra::{
    is_anticommuting, is_c_faithful, is_commutative, is_idempotent_algebra, is_left_faithful, is_right_faithful,
    is_three_commutative,
};
use opalg::examples::{anticommuting_family, corpus, ex1, CorpusEntry};
use opalg::reversibility::{decide_reversible, envelope_kp, KpStatus, Reversible};
use opalg::tro::EnvelopeStatus;
use opalg::{CMatrix, ToleranceConfig};
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

fn small_corpus() -> &'static [CorpusEntry] {
    static C: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    C.get_or_init(|| {
        corpus(&ToleranceConfig::default())
            .unwrap()
            .into_iter()
            .filter(|e| e.algebra.n() <= 6)
            .collect()
    })
}

/// Real directions `d` in the envelope with `x d* y = 0` for all basis pairs.
fn kernel_directions(basis: &[CMatrix], frame: &[CMatrix]) -> Vec<CMatrix> {
    let cols: Vec<CMatrix> = frame.iter().cloned().chain(frame.iter().map(|f| f * opalg::linalg::I)).collect();
    let mut rows = Vec::new();
    for x in basis {
        for y in basis {
            let imgs: Vec<CMatrix> = cols.iter().map(|c| x * c.adjoint() * y).collect();
            for idx in 0..imgs[0].len() {
                rows.push(imgs.iter().map(|m| m[idx].re).collect::<Vec<_>>());
                rows.push(imgs.iter().map(|m| m[idx].im).collect::<Vec<_>>());
            }
        }
    }
    let a = DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i][j]);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let top = svd.singular_values.iter().cloned().fold(1.0, f64::max);
    (0..cols.len())
        .filter(|&k| svd.singular_values.get(k).map_or(true, |&s| s <= 1e-10 * top))
        .map(|k| {
            cols.iter()
                .zip(v_t.row(k).iter())
                .fold(CMatrix::zeros(frame[0].nrows(), frame[0].ncols()), |acc, (c, &t)| acc + c * opalg::linalg::C64::new(t, 0.0))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unique_kp_solutions_are_isolated_in_the_ball(idx in 0usize..64, seed: u64) {
        let tol = ToleranceConfig::default();
        let entries = small_corpus();
        let entry = &entries[idx % entries.len()];
        let ek = envelope_kp(&entry.algebra, &tol).unwrap();
        prop_assume!(ek.status == EnvelopeStatus::Exact);
        let mut r = rng(seed);
        for kp in [&ek.z, &ek.w] {
            if kp.status != KpStatus::UniqueInBall {
                continue;
            }
            let dirs = kernel_directions(&ek.basis, ek.envelope.basis());
            if dirs.is_empty() {
                continue;
            }
            let d = dirs.iter().fold(CMatrix::zeros(kp.element.nrows(), kp.element.ncols()), |acc, d| {
                let c: f64 = StandardNormal.sample(&mut r);
                acc + d * opalg::linalg::C64::new(c, 0.0)
            });
            let d = d.unscale(opnorm(&d));
            for sign in [1.0, -1.0] {
                let moved = &kp.element + &d * opalg::linalg::C64::new(0.01 * sign, 0.0);
                prop_assert!(opnorm(&moved) > 1.0 + 1e-12, "{}: perturbation stays in the ball", entry.name);
            }
        }
    }

    #[test]
    fn verdicts_survive_unitary_conjugation(idx in 0usize..64, seed: u64) {
        let tol = ToleranceConfig::default();
        let entries = small_corpus();
        let entry = &entries[idx % entries.len()];
        let a = &entry.algebra;
        let b = conjugate(a, seed, &tol);
        let (ra, rb) = (decide_reversible(a, &tol).unwrap().reversible, decide_reversible(&b, &tol).unwrap().reversible);
        if ra != Reversible::Undecided && rb != Reversible::Undecided {
            prop_assert_eq!(ra, rb, "{}", entry.name);
        }
        prop_assert_eq!(is_commutative(a, &tol), is_commutative(&b, &tol));
        prop_assert_eq!(is_three_commutative(a, &tol), is_three_commutative(&b, &tol));
    }

    #[test]
    fn reversibility_theorems_hold_on_conjugates(idx in 0usize..64, seed: u64) {
        let tol = ToleranceConfig::default();
        let entries = small_corpus();
        let entry = &entries[idx % entries.len()];
        let b = conjugate(&entry.algebra, seed, &tol);
        let rev = decide_reversible(&b, &tol).unwrap().reversible == Reversible::Yes;
        if rev {
            prop_assert!(is_three_commutative(&b, &tol), "{}", entry.name);
            let faithful = is_idempotent_algebra(&b, &tol).unwrap()
                || is_left_faithful(&b, &tol).unwrap()
                || is_right_faithful(&b, &tol).unwrap()
                || is_c_faithful(&b, &tol).unwrap();
            prop_assert!(!faithful || is_commutative(&b, &tol), "{}", entry.name);
        }
        if is_anticommuting(&b, &tol) {
            prop_assert!(rev, "{}", entry.name);
        }
    }
}

#[test]
fn ex1_elements_square_to_zero_through_z_and_w() {
    let tol = ToleranceConfig::default();
    let a = ex1(&tol).unwrap();
    let ek = envelope_kp(&a, &tol).unwrap();
    let (zs, ws) = (ek.z.element.adjoint(), ek.w.element.adjoint());
    let mut r = rng(3);
    for _ in 0..20 {
        let x = common::lin_comb(&ek.basis, &mut r);
        assert!(opnorm(&(&x * &x)) <= 1e-12);
        assert!(opnorm(&(&x * &zs * &x)) <= 1e-9);
        assert!(opnorm(&(&x * &ws * &x)) <= 1e-9);
    }
}

#[test]
fn anticommuting_families_pass_the_pipeline() {
    let tol = ToleranceConfig::default();
    for n in 1..=3 {
        let a = anticommuting_family(n, &tol).unwrap();
        let v = decide_reversible(&a, &tol).unwrap();
        assert_eq!(v.reversible, Reversible::Yes);
        assert!(!v.commutative && is_three_commutative(&a, &tol));
        let ek = envelope_kp(&a, &tol).unwrap();
        assert_eq!(ek.dims, vec![(2 * n + 1, 2 * n + 1)]);
        assert_eq!(ek.z.status, KpStatus::UniqueInBall);
    }
}
