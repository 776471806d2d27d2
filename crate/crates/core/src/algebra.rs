//! Matrix algebras: closure, commutativity variants, faithfulness, radical, Wedderburn split.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    hs_norm, identity, lstsq, null_space, orthonormalize, CMatrix, Subspace, ToleranceConfig, C64, ONE,
};

/// A subspace of `M_n` closed under multiplication.
#[derive(Debug, Clone)]
pub struct MatrixAlgebra {
    space: Subspace,
    closure_residual: f64,
}

impl MatrixAlgebra {
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> &[CMatrix] {
        self.space.basis()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Side length `n` of the ambient `M_n`.
    pub fn n(&self) -> usize {
        self.space.rows()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    /// Conjugate every element by a unitary: `u a u*`.
    pub fn conjugated(&self, u: &CMatrix, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
        let mats: Vec<CMatrix> = self.basis().iter().map(|b| u * b * u.adjoint()).collect();
        verify_algebra(&orthonormalize(self.n(), self.n(), &mats, tol)?, tol)
    }
}

/// Check closure under products over all basis pairs.
pub fn verify_algebra(s: &Subspace, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    if s.rows() != s.cols() {
        return Err(Error::NotSquare(s.rows(), s.cols()));
    }
    let mut worst = (0, 0, 0.0f64);
    let mut failed = false;
    for (i, a) in s.basis().iter().enumerate() {
        for (j, b) in s.basis().iter().enumerate() {
            let p = a * b;
            let r = s.residual(&p);
            if r > worst.2 {
                worst = (i, j, r);
            }
            if r > tol.eq_tol * hs_norm(&p).max(1.0) {
                failed = true;
            }
        }
    }
    if failed {
        return Err(Error::NotAnAlgebra {
            i: worst.0,
            j: worst.1,
            residual: worst.2,
        });
    }
    Ok(MatrixAlgebra {
        space: s.clone(),
        closure_residual: worst.2,
    })
}

/// The algebra generated by `mats` (span closure under products, optionally adjoints).
pub fn generate_algebra(
    n: usize,
    mats: &[CMatrix],
    star: bool,
    tol: &ToleranceConfig,
) -> Result<MatrixAlgebra> {
    let mut gens: Vec<CMatrix> = mats.to_vec();
    if star {
        gens.extend(mats.iter().map(|m| m.adjoint()));
    }
    let mut space = orthonormalize(n, n, &gens, tol)?;
    loop {
        let basis = space.basis().to_vec();
        let mut extra = Vec::new();
        for a in &basis {
            for b in &basis {
                let p = a * b;
                if !space.contains(&p, tol)? {
                    extra.push(p);
                }
            }
        }
        if extra.is_empty() {
            break;
        }
        let next = space.extend(&extra, tol)?;
        if next.dim() == space.dim() {
            break;
        }
        space = next;
    }
    verify_algebra(&space, tol)
}

fn is_zero_matrix(m: &CMatrix, scale: f64, tol: &ToleranceConfig) -> bool {
    tol.is_zero(hs_norm(m), scale)
}

pub fn is_commutative(a: &MatrixAlgebra, tol: &ToleranceConfig) -> bool {
    let b = a.basis();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let ab = &b[i] * &b[j];
            let ba = &b[j] * &b[i];
            if !is_zero_matrix(&(&ab - &ba), hs_norm(&ab) + hs_norm(&ba), tol) {
                return false;
            }
        }
    }
    true
}

/// `xy = −yx` for all `x, y` (in particular `x² = 0`).
pub fn is_anticommuting(a: &MatrixAlgebra, tol: &ToleranceConfig) -> bool {
    let b = a.basis();
    for i in 0..b.len() {
        for j in i..b.len() {
            let ab = &b[i] * &b[j];
            let ba = &b[j] * &b[i];
            if !is_zero_matrix(&(&ab + &ba), hs_norm(&ab) + hs_norm(&ba), tol) {
                return false;
            }
        }
    }
    true
}

/// All products of three basis elements are invariant under permutation of the factors.
///
/// Checking triples suffices: any adjacent transposition inside a longer product sits in
/// a window of three consecutive factors (the property tests exercise lengths 4 and 5).
pub fn is_three_commutative(a: &MatrixAlgebra, tol: &ToleranceConfig) -> bool {
    let b = a.basis();
    let d = b.len();
    let pairs: Vec<Vec<CMatrix>> = (0..d)
        .map(|i| (0..d).map(|j| &b[i] * &b[j]).collect())
        .collect();
    for i in 0..d {
        for j in i..d {
            for k in j..d {
                let perms = [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ];
                let base = &pairs[i][j] * &b[k];
                let scale = hs_norm(&base);
                for &(p, q, r) in &perms[1..] {
                    let other = &pairs[p][q] * &b[r];
                    if !is_zero_matrix(&(&other - &base), scale + hs_norm(&other), tol) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Span of `b_i b_j − b_j b_i`.
///
/// Commutators that [`is_commutative`] would call zero are dropped first, so the two agree.
pub fn commutator_subspace(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<Subspace> {
    let b = a.basis();
    let mut comms = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let ab = &b[i] * &b[j];
            let ba = &b[j] * &b[i];
            let scale = hs_norm(&ab) + hs_norm(&ba);
            let c = ab - ba;
            if !is_zero_matrix(&c, scale, tol) {
                comms.push(c);
            }
        }
    }
    orthonormalize(a.n(), a.n(), &comms, tol)
}

/// Span of all products `b_i b_j`.
pub fn product_space(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<Subspace> {
    let b = a.basis();
    let mut prods = Vec::with_capacity(b.len() * b.len());
    for x in b {
        for y in b {
            let p = x * y;
            if !is_zero_matrix(&p, hs_norm(x) * hs_norm(y), tol) {
                prods.push(p);
            }
        }
    }
    orthonormalize(a.n(), a.n(), &prods, tol)
}

/// `{x ∈ V : f(x, b) = 0 for every basis element b of A}` for a bilinear action `f`.
fn kernel_of_action<F>(v: &Subspace, a: &MatrixAlgebra, f: F, tol: &ToleranceConfig) -> Result<Subspace>
where
    F: Fn(&CMatrix, &CMatrix) -> CMatrix,
{
    let n = a.n();
    if v.is_zero() {
        return Ok(Subspace::zero(n, n));
    }
    let nn = n * n;
    let d = v.dim();
    let mut m = CMatrix::zeros(nn * a.dim().max(1), d);
    for (l, x) in v.basis().iter().enumerate() {
        for (j, b) in a.basis().iter().enumerate() {
            let p = f(x, b);
            for (idx, val) in p.as_slice().iter().enumerate() {
                m[(j * nn + idx, l)] = *val;
            }
        }
    }
    let ns = null_space(&m, tol.eq_tol);
    let mats: Vec<CMatrix> = (0..ns.ncols())
        .map(|c| {
            let coeffs: Vec<C64> = (0..d).map(|i| ns[(i, c)]).collect();
            v.from_coords(&coeffs)
        })
        .collect();
    orthonormalize(n, n, &mats, tol)
}

/// `(left, right)` with `left = {a : aA = 0}` and `right = {a : Aa = 0}`.
pub fn annihilators(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<(Subspace, Subspace)> {
    let left = kernel_of_action(a.space(), a, |x, b| x * b, tol)?;
    let right = kernel_of_action(a.space(), a, |x, b| b * x, tol)?;
    Ok((left, right))
}

/// `aA = 0` implies `a = 0`.
pub fn is_left_faithful(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    Ok(kernel_of_action(a.space(), a, |x, b| x * b, tol)?.is_zero())
}

/// `Aa = 0` implies `a = 0`.
pub fn is_right_faithful(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    Ok(kernel_of_action(a.space(), a, |x, b| b * x, tol)?.is_zero())
}

/// The products span the whole algebra.
pub fn is_idempotent_algebra(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    Ok(product_space(a, tol)?.dim() == a.dim())
}

/// The commutator ideal acts faithfully on the left or on the right.
pub fn is_c_faithful(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    let j = commutator_subspace(a, tol)?;
    if j.is_zero() {
        return Ok(true);
    }
    let left_dead = kernel_of_action(&j, a, |x, b| x * b, tol)?;
    let right_dead = kernel_of_action(&j, a, |x, b| b * x, tol)?;
    Ok(left_dead.is_zero() || right_dead.is_zero())
}

/// Jacobson radical via the trace form: `{a ∈ A : tr(ab) = 0 for all b ∈ A}`.
///
/// This set is an ideal, and each of its elements has `tr(a^k) = 0` for `k ≥ 2`, which
/// forces every eigenvalue to vanish; so it is a nil (hence nilpotent) ideal. Conversely
/// `ab` is nilpotent for `a` in the radical.
pub fn radical(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<Subspace> {
    let n = a.n();
    let b = a.basis();
    let d = b.len();
    if d == 0 {
        return Ok(Subspace::zero(n, n));
    }
    let mut t = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            t[(i, j)] = (&b[i] * &b[j]).trace();
        }
    }
    let ns = null_space(&t, tol.eq_tol);
    let mats: Vec<CMatrix> = (0..ns.ncols())
        .map(|c| {
            let coeffs: Vec<C64> = (0..d).map(|i| ns[(i, c)]).collect();
            a.space().from_coords(&coeffs)
        })
        .collect();
    orthonormalize(n, n, &mats, tol)
}

/// Successive powers `A, A², A³, …` until zero or stable.
pub fn power_dims(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<Vec<usize>> {
    let n = a.n();
    let mut dims = vec![a.dim()];
    let mut cur = a.space().clone();
    for _ in 0..=a.dim() {
        if cur.is_zero() {
            break;
        }
        let mut prods = Vec::new();
        for x in cur.basis() {
            for y in a.basis() {
                // A^{k+1} ⊆ A^k; projecting keeps round-off from adding dimensions
                prods.push(cur.project(&(x * y)));
            }
        }
        let next = orthonormalize(n, n, &prods, tol)?;
        dims.push(next.dim());
        if next.dim() == cur.dim() {
            break;
        }
        cur = next;
    }
    Ok(dims)
}

pub fn is_nilpotent(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    Ok(power_dims(a, tol)?.last() == Some(&0) || a.dim() == 0)
}

/// `true` when `I·A ⊆ I` and `A·I ⊆ I`.
pub fn is_ideal(i: &Subspace, a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<bool> {
    for x in i.basis() {
        for b in a.basis() {
            if !i.contains(&(x * b), tol)? || !i.contains(&(b * x), tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Abstract algebras given by structure constants
// ---------------------------------------------------------------------------

/// Finite-dimensional algebra with `e_i e_j = Σ_k table[i][j][k] e_k`.
#[derive(Debug, Clone)]
pub struct AbstractAlgebra {
    dim: usize,
    table: Vec<Vec<DVector<C64>>>,
}

impl AbstractAlgebra {
    pub fn new(dim: usize, table: Vec<Vec<DVector<C64>>>) -> Self {
        Self { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn product(&self, x: &DVector<C64>, y: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            if x[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.dim {
                out += &self.table[i][j] * (x[i] * y[j]);
            }
        }
        out
    }

    /// Faithful matrix model: left multiplication on the unitization `C·1 ⊕ A`.
    pub fn regular_representation(&self, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
        let d = self.dim;
        let mats: Vec<CMatrix> = (0..d)
            .map(|i| {
                let mut m = CMatrix::zeros(d + 1, d + 1);
                // column 0 is the adjoined unit: e_i · 1 = e_i
                m[(i + 1, 0)] = ONE;
                for j in 0..d {
                    for k in 0..d {
                        m[(k + 1, j + 1)] = self.table[i][j][k];
                    }
                }
                m
            })
            .collect();
        let s = orthonormalize(d + 1, d + 1, &mats, tol)?;
        if s.dim() != d {
            return Err(Error::Degenerate("regular representation is not faithful".into()));
        }
        verify_algebra(&s, tol)
    }
}

/// Structure constants of `A/I` on the orthogonal complement of the ideal `I` inside `A`.
pub fn quotient(a: &MatrixAlgebra, ideal: &Subspace, tol: &ToleranceConfig) -> Result<(Subspace, AbstractAlgebra)> {
    let n = a.n();
    let comp_in_ambient = ideal.complement(tol);
    let q = a.space().intersect(&comp_in_ambient, tol)?;
    let q = if q.dim() + ideal.dim() == a.dim() {
        q
    } else {
        // fall back to projecting the basis of A off the ideal
        let mats: Vec<CMatrix> = a.basis().iter().map(|b| b - ideal.project(b)).collect();
        orthonormalize(n, n, &mats, tol)?
    };
    let d = q.dim();
    let table = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| q.coords(&(&q.basis()[i] * &q.basis()[j])))
                .collect()
        })
        .collect();
    Ok((q, AbstractAlgebra::new(d, table)))
}

// ---------------------------------------------------------------------------
// Wedderburn split
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum WedderburnSplit {
    /// The algebra is nilpotent: it equals its radical.
    RadicalOnly,
    /// `A = C ⊕ K` with `C = fA` unital commutative and `K = (1 − f)A` nilpotent.
    Split {
        c: MatrixAlgebra,
        k: MatrixAlgebra,
        f: CMatrix,
    },
}

/// Split a 3-commutative algebra into a unital commutative ideal and a nilpotent ideal.
pub fn wedderburn_split(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<WedderburnSplit> {
    if !is_three_commutative(a, tol) {
        return Err(Error::NotThreeCommutative);
    }
    let n = a.n();
    let rad = radical(a, tol)?;
    if rad.dim() == a.dim() {
        return Ok(WedderburnSplit::RadicalOnly);
    }
    let (q, table) = quotient(a, &rad, tol)?;
    let s = q.dim();

    // identity of the quotient: Σ_i ε_i (q_i ∘ q_j) = q_j for every j
    let mut m = CMatrix::zeros(s * s, s);
    let mut rhs = DVector::<C64>::zeros(s * s);
    for j in 0..s {
        for i in 0..s {
            for k in 0..s {
                m[(j * s + k, i)] = table.table[i][j][k];
            }
        }
        rhs[j * s + j] = ONE;
    }
    let eps = lstsq(&m, &rhs, tol.eq_tol);
    let mut f = q.from_coords(eps.as_slice());

    let mut converged = false;
    for _ in 0..100 {
        let f2 = &f * &f;
        if tol.is_zero(hs_norm(&(&f2 - &f)), hs_norm(&f)) {
            converged = true;
            break;
        }
        let f3 = &f2 * &f;
        f = f2 * C64::new(3.0, 0.0) - f3 * C64::new(2.0, 0.0);
    }
    if !converged {
        return Err(Error::Degenerate("idempotent lifting did not converge".into()));
    }

    let c_mats: Vec<CMatrix> = a.basis().iter().map(|b| &f * b * &f).collect();
    let k_mats: Vec<CMatrix> = a.basis().iter().map(|b| b - &f * b).collect();
    let c_space = orthonormalize(n, n, &c_mats, tol)?;
    let k_space = orthonormalize(n, n, &k_mats, tol)?;
    if c_space.dim() + k_space.dim() != a.dim() {
        return Err(Error::Degenerate("C and K do not span A as a direct sum".into()));
    }
    let c = verify_algebra(&c_space, tol)?;
    let k = verify_algebra(&k_space, tol)?;
    for x in c.basis() {
        for y in k.basis() {
            let scale = hs_norm(x) * hs_norm(y);
            if !tol.is_zero(hs_norm(&(x * y)), scale) || !tol.is_zero(hs_norm(&(y * x)), scale) {
                return Err(Error::Degenerate("C and K do not annihilate each other".into()));
            }
        }
    }
    Ok(WedderburnSplit::Split { c, k, f })
}

/// Identity element of a unital algebra, if it has one (solved by least squares).
pub fn unit_of(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Option<CMatrix> {
    let d = a.dim();
    let n = a.n();
    if d == 0 {
        return None;
    }
    if a.space().contains(&identity(n), tol).unwrap_or(false) {
        return Some(identity(n));
    }
    let nn = n * n;
    let mut m = CMatrix::zeros(2 * nn * d, d);
    let mut rhs = DVector::<C64>::zeros(2 * nn * d);
    for (j, bj) in a.basis().iter().enumerate() {
        for (i, bi) in a.basis().iter().enumerate() {
            let l = bi * bj;
            let r = bj * bi;
            for idx in 0..nn {
                m[(j * 2 * nn + idx, i)] = l.as_slice()[idx];
                m[(j * 2 * nn + nn + idx, i)] = r.as_slice()[idx];
            }
        }
        for idx in 0..nn {
            rhs[j * 2 * nn + idx] = bj.as_slice()[idx];
            rhs[j * 2 * nn + nn + idx] = bj.as_slice()[idx];
        }
    }
    let x = lstsq(&m, &rhs, tol.eq_tol);
    let res = (&m * &x - &rhs).norm();
    if !tol.is_zero(res, rhs.norm()) {
        return None;
    }
    Some(a.space().from_coords(x.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{direct_sum, unit};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn e(n: usize, i: usize, j: usize) -> CMatrix {
        unit(n, n, i - 1, j - 1)
    }

    fn alg(n: usize, mats: &[CMatrix]) -> MatrixAlgebra {
        verify_algebra(&orthonormalize(n, n, mats, &tol()).unwrap(), &tol()).unwrap()
    }

    fn ex1() -> MatrixAlgebra {
        let u = e(4, 1, 3) + e(4, 2, 4);
        let v = e(4, 1, 2) - e(4, 3, 4);
        let uv = &u * &v;
        alg(4, &[u, v, uv])
    }

    fn strict_upper3() -> MatrixAlgebra {
        alg(3, &[e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)])
    }

    fn upper2() -> MatrixAlgebra {
        alg(2, &[e(2, 1, 1), e(2, 1, 2), e(2, 2, 2)])
    }

    fn diag(n: usize) -> MatrixAlgebra {
        let mats: Vec<CMatrix> = (1..=n).map(|i| e(n, i, i)).collect();
        alg(n, &mats)
    }

    /// Largest nilpotent ideal spanned by a subset of the given basis.
    fn brute_force_radical_dim(a: &MatrixAlgebra, basis: &[CMatrix]) -> usize {
        let t = tol();
        let d = basis.len();
        let mut best = 0;
        for mask in 1u32..(1 << d) {
            let mats: Vec<CMatrix> = (0..d).filter(|i| mask & (1 << i) != 0).map(|i| basis[i].clone()).collect();
            let s = orthonormalize(a.n(), a.n(), &mats, &t).unwrap();
            if !is_ideal(&s, a, &t).unwrap() {
                continue;
            }
            let Ok(sub) = verify_algebra(&s, &t) else { continue };
            if is_nilpotent(&sub, &t).unwrap() {
                best = best.max(s.dim());
            }
        }
        best
    }

    #[test]
    fn ex1_closure_and_predicates() {
        let t = tol();
        let a = ex1();
        assert_eq!(a.dim(), 3);
        assert!(is_anticommuting(&a, &t));
        assert!(!is_commutative(&a, &t));
        assert!(is_three_commutative(&a, &t));
        assert!(!is_left_faithful(&a, &t).unwrap());
        assert!(!is_idempotent_algebra(&a, &t).unwrap());
        assert!(!is_c_faithful(&a, &t).unwrap());
        let c = commutator_subspace(&a, &t).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&e(4, 1, 4), &t).unwrap());
        let (l, r) = annihilators(&a, &t).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(r.dim(), 1);
        assert!(l.contains(&e(4, 1, 4), &t).unwrap());
    }

    #[test]
    fn non_closed_span_is_rejected() {
        let t = tol();
        let s = orthonormalize(2, 2, &[e(2, 1, 2) + e(2, 2, 1)], &t).unwrap();
        assert!(matches!(verify_algebra(&s, &t), Err(Error::NotAnAlgebra { .. })));
        let z = orthonormalize(2, 2, &[e(2, 1, 2)], &t).unwrap();
        assert!(verify_algebra(&z, &t).is_ok());
    }

    #[test]
    fn strict_upper_predicates() {
        let t = tol();
        let a = strict_upper3();
        assert!(!is_commutative(&a, &t));
        assert!(!is_anticommuting(&a, &t));
        assert!(is_three_commutative(&a, &t));
        let c = commutator_subspace(&a, &t).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&e(3, 1, 3), &t).unwrap());
        assert_eq!(radical(&a, &t).unwrap().dim(), 3);
        assert!(matches!(wedderburn_split(&a, &t).unwrap(), WedderburnSplit::RadicalOnly));
    }

    #[test]
    fn upper_triangular_is_not_three_commutative() {
        let t = tol();
        assert!(!is_three_commutative(&upper2(), &t));
        let a = alg(2, &[e(2, 1, 1), e(2, 1, 2)]);
        assert!(matches!(wedderburn_split(&a, &t), Err(Error::NotThreeCommutative)));
    }

    #[test]
    fn diagonal_is_unital_and_faithful() {
        let t = tol();
        let a = diag(3);
        assert!(is_commutative(&a, &t));
        assert!(is_left_faithful(&a, &t).unwrap());
        assert!(is_right_faithful(&a, &t).unwrap());
        assert!(is_idempotent_algebra(&a, &t).unwrap());
        assert!(is_c_faithful(&a, &t).unwrap());
        assert_eq!(radical(&a, &t).unwrap().dim(), 0);
        let (l, r) = annihilators(&a, &t).unwrap();
        assert!(l.is_zero() && r.is_zero());
        assert!(commutator_subspace(&a, &t).unwrap().is_zero());
    }

    #[test]
    fn square_zero_annihilators() {
        let t = tol();
        let a = alg(2, &[e(2, 1, 2)]);
        let (l, r) = annihilators(&a, &t).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(r.dim(), 1);
        let b = alg(3, &[e(3, 1, 2), e(3, 1, 3)]);
        assert!(!is_idempotent_algebra(&b, &t).unwrap());
    }

    #[test]
    fn radical_matches_brute_force() {
        let t = tol();
        let cases: Vec<(MatrixAlgebra, Vec<CMatrix>)> = vec![
            (upper2(), vec![e(2, 1, 1), e(2, 1, 2), e(2, 2, 2)]),
            (strict_upper3(), vec![e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)]),
            (diag(3), vec![e(3, 1, 1), e(3, 2, 2), e(3, 3, 3)]),
            (
                alg(3, &[e(3, 1, 1), e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)]),
                vec![e(3, 1, 1), e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)],
            ),
        ];
        for (a, basis) in cases {
            assert_eq!(radical(&a, &t).unwrap().dim(), brute_force_radical_dim(&a, &basis));
        }
        let r = radical(&upper2(), &t).unwrap();
        assert!(r.contains(&e(2, 1, 2), &t).unwrap());
    }

    #[test]
    fn wedderburn_block_example() {
        let t = tol();
        let i2 = identity(2);
        let z2 = CMatrix::zeros(2, 2);
        let p = direct_sum(&[&i2, &z2]);
        let k = direct_sum(&[&z2, &e(2, 1, 2)]);
        let a = alg(4, &[p.clone(), k.clone()]);
        match wedderburn_split(&a, &t).unwrap() {
            WedderburnSplit::Split { c, k: kk, f } => {
                assert_eq!(c.dim(), 1);
                assert_eq!(kk.dim(), 1);
                assert!(c.space().contains(&p, &t).unwrap());
                assert!(kk.space().contains(&k, &t).unwrap());
                assert!((&f - &p).norm() < 1e-12);
            }
            WedderburnSplit::RadicalOnly => panic!("expected a split"),
        }
    }

    #[test]
    fn quotient_by_radical_is_semisimple() {
        let t = tol();
        let a = alg(3, &[e(3, 1, 1), e(3, 2, 2) + e(3, 3, 3), e(3, 2, 3)]);
        let rad = radical(&a, &t).unwrap();
        assert_eq!(rad.dim(), 1);
        let (_, q) = quotient(&a, &rad, &t).unwrap();
        let model = q.regular_representation(&t).unwrap();
        assert_eq!(radical(&model, &t).unwrap().dim(), 0);
    }

    #[test]
    fn generate_algebra_closes() {
        let t = tol();
        let a = generate_algebra(3, &[e(3, 1, 2), e(3, 2, 3)], false, &t).unwrap();
        assert_eq!(a.dim(), 3);
        let b = generate_algebra(2, &[e(2, 1, 2)], true, &t).unwrap();
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn unit_detection() {
        let t = tol();
        let a = alg(4, &[direct_sum(&[&identity(2), &CMatrix::zeros(2, 2)])]);
        let u = unit_of(&a, &t).unwrap();
        assert!((u - direct_sum(&[&identity(2), &CMatrix::zeros(2, 2)])).norm() < 1e-10);
        assert!(unit_of(&strict_upper3(), &t).is_none());
    }
}
