#![allow(dead_code)]

use opalg::algebra::{generate_algebra, MatrixAlgebra};
use opalg::linalg::{direct_sum, identity, random_gaussian, random_unitary, C64};
use opalg::{CMatrix, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> CMatrix {
    random_gaussian(rows, cols, &mut rng(seed))
}

/// Gaussian entries on a random half of the positions.
pub fn sparse(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let g = random_gaussian(rows, cols, r);
        let out = g.map(|v| if r.random_bool(0.5) { v } else { C64::new(0.0, 0.0) });
        if out.norm() > 0.1 {
            return out;
        }
    }
}

/// Spectral norm from nalgebra's SVD, independent of the library's routine.
pub fn opnorm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

pub fn lin_comb(basis: &[CMatrix], r: &mut ChaCha8Rng) -> CMatrix {
    let (m, n) = basis[0].shape();
    let c = random_gaussian(basis.len(), 1, r);
    basis.iter().zip(c.iter()).fold(CMatrix::zeros(m, n), |acc, (b, s)| acc + b * *s)
}

pub fn conjugate(a: &MatrixAlgebra, seed: u64, tol: &ToleranceConfig) -> MatrixAlgebra {
    a.conjugated(&random_unitary(a.n(), seed), tol).expect("conjugate")
}

/// The (non-unital) algebra generated by one random matrix: commutative.
///
/// Eigenvalues are spread over `[-1, 1]`, kept off zero, and the nilpotent part is small,
/// so powers stay bounded and the span is numerically well conditioned. An eigenvalue near
/// zero under a Jordan block would leave the closure ambiguous at `eq_tol`.
pub fn polynomial_family(n: usize, seed: u64, tol: &ToleranceConfig) -> MatrixAlgebra {
    let mut r = rng(seed);
    let step = 2.0 / n as f64;
    let jitter: Vec<f64> = (0..n).map(|_| r.random_range(0.25..0.35)).collect();
    let mut slot = 0;
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        // occasionally repeat an eigenvalue exactly so Jordan blocks appear
        if i > 0 && !r.random_bool(0.2) {
            slot = i;
        }
        C64::new(-1.0 + step * (slot as f64 + jitter[slot]), 0.0)
    }));
    let nil = CMatrix::from_fn(n, n, |i, j| {
        if j > i && r.random_bool(0.5) {
            let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
            C64::new(sign * r.random_range(0.1..0.3), 0.0)
        } else { C64::new(0.0, 0.0) }
    });
    let u = random_unitary(n, seed ^ 0x9e37);
    let x = &u * (d + nil) * u.adjoint();
    generate_algebra(n, &[x], false, tol).expect("polynomial family")
}

/// `span{I_k ⊕ 0, 0 ⊕ N}` with `N` a random strictly upper triangular algebra, conjugated.
pub fn unit_plus_nilpotent(k: usize, m: usize, seed: u64, tol: &ToleranceConfig) -> MatrixAlgebra {
    let nil = opalg::examples::random_triangular_algebra(m, 3, seed, tol).expect("triangular sample");
    let mut mats = vec![direct_sum(&[&identity(k), &CMatrix::zeros(m, m)])];
    mats.extend(nil.basis().iter().map(|b| direct_sum(&[&CMatrix::zeros(k, k), b])));
    let a = generate_algebra(k + m, &mats, false, tol).expect("split sample");
    conjugate(&a, seed.wrapping_add(17), tol)
}
