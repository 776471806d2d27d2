//! Concrete algebras: Ex1 and its generalizations, the isometry example, CAR spaces,
//! strictly upper triangular algebras and a seeded random sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{generate_algebra, verify_algebra, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{
    direct_sum, hs_norm, identity, kron, orthonormalize, unit, CMatrix, Subspace, ToleranceConfig, C64, I,
};

/// `e_ij` in `M_n`, one-based as in the literature.
pub fn e(n: usize, i: usize, j: usize) -> CMatrix {
    unit(n, n, i - 1, j - 1)
}

fn span_algebra(n: usize, mats: &[CMatrix], tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    verify_algebra(&orthonormalize(n, n, mats, tol)?, tol)
}

/// `U = e13 + e24`, `V = e12 − e34`.
pub fn ex1_generators() -> (CMatrix, CMatrix) {
    (e(4, 1, 3) + e(4, 2, 4), e(4, 1, 2) - e(4, 3, 4))
}

/// `span{U, V, UV}` in `M_4`.
pub fn ex1(tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    let (u, v) = ex1_generators();
    let uv = &u * &v;
    span_algebra(4, &[u, v, uv], tol)
}

/// The unitary `e41 + e32 − e23 − e14`; `w* x w = −xᵀ` on Ex1.
pub fn ex1_symmetry_unitary() -> CMatrix {
    e(4, 4, 1) + e(4, 3, 2) - e(4, 2, 3) - e(4, 1, 4)
}

/// `pq = 0 ⊕ I_m ⊕ 0` in `M_{m+2}`.
pub fn corner_projection(m: usize) -> CMatrix {
    let z = CMatrix::zeros(1, 1);
    direct_sum(&[&z, &identity(m), &z])
}

/// `u_1, …, u_{2n}` in `M_{2n+2}`, built from `w_i = e_i ⊗ e_1`, `v_i = c_i = e_i ⊗ e_2`,
/// `d_i = −e_i ⊗ e_1`.
pub fn anticommuting_generators(n: usize) -> Vec<CMatrix> {
    assert!(n >= 1);
    let size = 2 * n + 2;
    // a column vector x ∈ C^n ⊗ C^2 sits at rows/cols 2..=2n+1 of the middle block
    let mid = |i: usize, k: usize| 2 + 2 * (i - 1) + (k - 1);
    let mut out = Vec::with_capacity(2 * n);
    for i in 1..=n {
        out.push(e(size, 1, mid(i, 1)) + e(size, mid(i, 2), size));
        out.push(e(size, 1, mid(i, 2)) - e(size, mid(i, 1), size));
    }
    out
}

/// `span{e_{1,2n+2}, u_1, …, u_{2n}}`.
pub fn anticommuting_family(n: usize, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    let mut mats = anticommuting_generators(n);
    mats.push(e(2 * n + 2, 1, 2 * n + 2));
    span_algebra(2 * n + 2, &mats, tol)
}

/// `u_i = e_{1,i+1} + (−1)^{i+1} e_{i+2,n+2}` in `M_{n+2}`. The vector `e_{n+1}` does not
/// exist in `C^n`, so `u_n` has no second term.
pub fn variant_generators(n: usize) -> Vec<CMatrix> {
    assert!(n >= 1);
    let size = n + 2;
    (1..=n)
        .map(|i| {
            let mut u = e(size, 1, i + 1);
            if i < n {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                u += e(size, i + 2, size) * C64::new(sign, 0.0);
            }
            u
        })
        .collect()
}

/// `span{e_{1,n+2}, u_1, …, u_n}`.
pub fn variant_family(n: usize, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    let mut mats = variant_generators(n);
    mats.push(e(n + 2, 1, n + 2));
    span_algebra(n + 2, &mats, tol)
}

/// `u = e12 ⊗ I + e34 ⊗ I`, `v = e13 ⊗ I + e24 ⊗ s`.
pub fn isometry_generators(s: &CMatrix) -> (CMatrix, CMatrix) {
    let m = s.nrows();
    let id = identity(m);
    let u = kron(&(e(4, 1, 2) + e(4, 3, 4)), &id);
    let v = kron(&e(4, 1, 3), &id) + kron(&e(4, 2, 4), s);
    (u, v)
}

/// `0 ⊕ s* ⊕ s ⊕ 0`, which satisfies `yx = x w y` on the isometry example.
pub fn isometry_w(s: &CMatrix) -> CMatrix {
    let z = CMatrix::zeros(s.nrows(), s.ncols());
    direct_sum(&[&z, &s.adjoint(), s, &z])
}

/// `span{u, v, uv, vu}` in `M_4(M_m)`.
pub fn isometry_example(s: &CMatrix, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare(s.nrows(), s.ncols()));
    }
    let m = s.nrows();
    let defect = hs_norm(&(s.adjoint() * s - identity(m)));
    if !tol.is_zero(defect, 1.0) {
        return Err(Error::NotIsometry(defect));
    }
    let (u, v) = isometry_generators(s);
    let uv = &u * &v;
    let vu = &v * &u;
    span_algebra(4 * m, &[u, v, uv, vu], tol)
}

/// Jordan–Wigner lowering operators `c_j = Z ⊗ … ⊗ Z ⊗ a ⊗ I ⊗ … ⊗ I` on `(C^2)^{⊗n}`.
pub fn car_generators(n: usize) -> Vec<CMatrix> {
    assert!((1..=5).contains(&n), "CAR generators are built for 1 ≤ n ≤ 5");
    let a = e(2, 1, 2);
    let zz = e(2, 1, 1) - e(2, 2, 2);
    let i2 = identity(2);
    (0..n)
        .map(|j| {
            let mut m = identity(1);
            for k in 0..n {
                let f = match k.cmp(&j) {
                    std::cmp::Ordering::Less => &zz,
                    std::cmp::Ordering::Equal => &a,
                    std::cmp::Ordering::Greater => &i2,
                };
                m = kron(&m, f);
            }
            m
        })
        .collect()
}

/// The operator space `Φ_n = span{c_1, …, c_n}` and the algebra it generates.
pub fn car_phi(n: usize, tol: &ToleranceConfig) -> Result<(Subspace, MatrixAlgebra)> {
    if !(1..=5).contains(&n) {
        return Err(Error::InvalidInput(format!("CAR rank must be in 1..=5, got {n}")));
    }
    let gens = car_generators(n);
    let size = 1 << n;
    let space = orthonormalize(size, size, &gens, tol)?;
    let alg = generate_algebra(size, &gens, false, tol)?;
    Ok((space, alg))
}

/// All strictly upper triangular matrices in `M_n`.
pub fn strict_upper(n: usize, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    assert!(n >= 2);
    let mats: Vec<CMatrix> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| e(n, i, j)))
        .collect();
    span_algebra(n, &mats, tol)
}

fn random_strict_upper<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let integer = rng.random_bool(0.5);
    let mut m = CMatrix::zeros(n, n);
    loop {
        for i in 0..n {
            for j in i + 1..n {
                if !rng.random_bool(0.5) {
                    continue;
                }
                m[(i, j)] = if integer {
                    C64::new([-2.0, -1.0, 1.0, 2.0][rng.random_range(0..4)], 0.0)
                } else {
                    let re: f64 = StandardNormal.sample(rng);
                    C64::new(re, 0.0)
                };
            }
        }
        if m.iter().any(|x| *x != C64::new(0.0, 0.0)) {
            return m;
        }
    }
}

fn strict_upper_part(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if j > i { m[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// A random subalgebra of `strict_upper(n)` of dimension at most `dim`: a few sparse
/// generators with entries either small integers or Gaussian, closed under products.
pub fn random_triangular_algebra(n: usize, dim: usize, seed: u64, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    assert!(n >= 2);
    if dim == 0 {
        return Err(Error::InvalidInput("dimension bound must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_gens = dim.min(3);
    for attempt in 0..64 {
        let gens_count = if attempt < 32 { rng.random_range(1..=max_gens) } else { 1 };
        let gens: Vec<CMatrix> = (0..gens_count).map(|_| random_strict_upper(n, &mut rng)).collect();
        let alg = generate_algebra(n, &gens, false, tol)?;
        if alg.dim() > dim || alg.dim() == 0 {
            continue;
        }
        // drop round-off below the superdiagonal and reject samples that are closed only
        // up to tolerance (near-degenerate spans)
        let clean: Vec<CMatrix> = alg.basis().iter().map(strict_upper_part).collect();
        let space = orthonormalize(n, n, &clean, tol)?;
        if space.dim() != alg.dim() {
            continue;
        }
        if let Ok(alg) = verify_algebra(&space, tol) {
            if alg.closure_residual() <= 1e-12 {
                return Ok(alg);
            }
        }
    }
    // a single matrix unit always fits
    span_algebra(n, &[e(n, 1, n)], tol)
}

/// A named algebra from the built-in corpus.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub algebra: MatrixAlgebra,
}

/// Every built-in example, used for theorem-consistency sweeps.
pub fn corpus(tol: &ToleranceConfig) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let mut push = |name: &str, algebra: MatrixAlgebra| {
        out.push(CorpusEntry {
            name: name.to_string(),
            algebra,
        })
    };

    push("ex1", ex1(tol)?);
    for n in 1..=2 {
        push(&format!("anticommuting_{n}"), anticommuting_family(n, tol)?);
    }
    for n in 1..=4 {
        push(&format!("variant_{n}"), variant_family(n, tol)?);
    }
    push("isometry_i", isometry_example(&(identity(1) * I), tol)?);
    let s2 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), I]));
    push("isometry_diag_1_i", isometry_example(&s2, tol)?);
    push("car_2", car_phi(2, tol)?.1);
    for n in 2..=4 {
        push(&format!("strict_upper_{n}"), strict_upper(n, tol)?);
    }
    push("diag_3", span_algebra(3, &[e(3, 1, 1), e(3, 2, 2), e(3, 3, 3)], tol)?);
    push("full_2", span_algebra(2, &[e(2, 1, 1), e(2, 1, 2), e(2, 2, 1), e(2, 2, 2)], tol)?);
    push("upper_2", span_algebra(2, &[e(2, 1, 1), e(2, 1, 2), e(2, 2, 2)], tol)?);
    push("corner_1_3", span_algebra(3, &[e(3, 1, 3)], tol)?);
    push("row_corner", span_algebra(3, &[e(3, 1, 2), e(3, 1, 3)], tol)?);
    push(
        "unit_plus_nilpotent",
        span_algebra(4, &[identity(2).resize(4, 4, C64::new(0.0, 0.0)), e(4, 3, 4)], tol)?,
    );
    push(
        "jordan_block_3",
        generate_algebra(3, &[identity(3), e(3, 1, 2) + e(3, 2, 3)], false, tol)?,
    );
    // Ex1 ⊕ (a commutative algebra): subalgebras of B ⊕ C are reversible
    let (u, v) = ex1_generators();
    let d1 = e(2, 1, 1);
    let z2 = CMatrix::zeros(2, 2);
    push(
        "ex1_plus_diag",
        generate_algebra(6, &[direct_sum(&[&u, &d1]), direct_sum(&[&v, &z2])], false, tol)?,
    );
    push("idempotent_upper", span_algebra(2, &[e(2, 1, 1), e(2, 1, 2)], tol)?);
    for seed in 0..3u64 {
        push(
            &format!("random_4_seed_{seed}"),
            random_triangular_algebra(4, 3, 0x5eed + seed, tol)?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_anticommuting, is_commutative};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ex1_relations() {
        let (u, v) = ex1_generators();
        let zero = CMatrix::zeros(4, 4);
        assert!(close(&(&u * &v), &-(&v * &u)));
        assert!(close(&(&u * &u), &zero) && close(&(&v * &v), &zero));
        assert!(close(&(u.adjoint() * &v), &-(&v * u.adjoint())));
        assert!(close(&(&v * &u), &e(4, 1, 4)));
        let a = ex1(&tol()).unwrap();
        assert_eq!(a.dim(), 3);
        let w = ex1_symmetry_unitary();
        for x in a.basis() {
            assert!(close(&(w.adjoint() * x * &w), &-x.transpose()));
        }
    }

    #[test]
    fn anticommuting_n1_matches_ex1_shape() {
        let g = anticommuting_generators(1);
        assert!(close(&g[0], &(e(4, 1, 2) + e(4, 3, 4))));
        assert!(close(&g[1], &(e(4, 1, 3) - e(4, 2, 4))));
        let a = anticommuting_family(1, &tol()).unwrap();
        assert_eq!(a.dim(), 3);
        assert!(is_anticommuting(&a, &tol()) && !is_commutative(&a, &tol()));
    }

    #[test]
    fn anticommuting_relations() {
        for n in 1..=3 {
            let g = anticommuting_generators(n);
            let size = 2 * n + 2;
            let corner = e(size, 1, size);
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let p = &g[i] * &g[j];
                    assert!(close(&p, &-(&g[j] * &g[i])));
                    if i.abs_diff(j) > 1 {
                        assert!(p.norm() < 1e-15);
                    }
                    // every product is a multiple of the corner unit
                    let c = p[(0, size - 1)];
                    assert!(close(&p, &(&corner * c)));
                }
            }
            for i in 0..n {
                assert!((&g[2 * i] * &g[2 * i + 1]).norm() > 0.5);
            }
            assert_eq!(anticommuting_family(n, &tol()).unwrap().dim(), 2 * n + 1);
        }
    }

    #[test]
    fn variant_products_land_in_corner() {
        for n in 1..=5 {
            let g = variant_generators(n);
            let corner = e(n + 2, 1, n + 2);
            for x in &g {
                for y in &g {
                    let p = x * y;
                    let c = p[(0, n + 1)];
                    assert!(close(&p, &(&corner * c)));
                }
            }
            assert_eq!(variant_family(n, &tol()).unwrap().dim(), n + 1);
        }
        let g = variant_generators(3);
        assert!(!close(&(&g[1] * &g[0]), &-(&g[0] * &g[1])));
    }

    #[test]
    fn isometry_relations() {
        let s = identity(1) * I;
        let (u, v) = isometry_generators(&s);
        assert!((&u * &u).norm() < 1e-15 && (&v * &v).norm() < 1e-15);
        assert!(close(&(&v * &u), &kron(&e(4, 1, 4), &identity(1))));
        assert!(close(&(&u * &v), &kron(&e(4, 1, 4), &s)));
        assert!(isometry_example(&(identity(2) * C64::new(2.0, 0.0)), &tol()).is_err());
        let s2 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), I]));
        let a = isometry_example(&s2, &tol()).unwrap();
        assert_eq!(a.dim(), 4);
        let w = isometry_w(&s2);
        for x in a.basis() {
            for y in a.basis() {
                assert!((y * x - x * &w * y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn car_relations() {
        for n in 1..=4 {
            let c = car_generators(n);
            let size = 1 << n;
            for i in 0..n {
                for j in 0..n {
                    let anti = &c[i] * &c[j] + &c[j] * &c[i];
                    assert!(anti.norm() < 1e-14);
                    let mixed = &c[i] * c[j].adjoint() + c[j].adjoint() * &c[i];
                    let expect = if i == j { identity(size) } else { CMatrix::zeros(size, size) };
                    assert!(close(&mixed, &expect));
                }
            }
        }
        let (space, alg) = car_phi(3, &tol()).unwrap();
        assert_eq!(space.dim(), 3);
        assert_eq!(alg.dim(), 7);
        assert!(car_phi(6, &tol()).is_err());
    }

    #[test]
    fn strict_upper_dims() {
        for n in 2..=5 {
            assert_eq!(strict_upper(n, &tol()).unwrap().dim(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn random_sampler_is_seeded_and_bounded() {
        let t = tol();
        for seed in 0..20 {
            let a = random_triangular_algebra(4, 3, seed, &t).unwrap();
            let b = random_triangular_algebra(4, 3, seed, &t).unwrap();
            assert!(a.dim() <= 3 && a.dim() >= 1);
            assert!(a.space().same_as(b.space(), &t));
            for x in a.basis() {
                for i in 0..4 {
                    for j in 0..=i {
                        assert!(x[(i, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_is_large_enough() {
        let c = corpus(&tol()).unwrap();
        assert!(c.len() >= 20);
    }
}
