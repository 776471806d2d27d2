//! Invariant subspaces, common eigenvectors and unitary triangularization of
//! 3-commuting matrix algebras.

use serde::{Deserialize, Serialize};

use crate::algebra::{commutator_subspace, generate_algebra, is_three_commutative, wedderburn_split, MatrixAlgebra, WedderburnSplit};
use crate::error::Result;
use crate::linalg::{eigenvalues, hs_norm, random_gaussian, identity, null_space, orthonormalize, range_projection, CMatrix, Subspace, ToleranceConfig, C64};

fn column(v: &CMatrix, j: usize) -> CMatrix {
    v.columns(j, 1).into_owned()
}

/// Normalized projection of the first standard basis vector that the projection does not
/// nearly kill; depends only on the range of `p`.
fn canonical_vector(p: &CMatrix) -> Option<CMatrix> {
    let n = p.nrows();
    let norms: Vec<f64> = (0..n).map(|j| p.column(j).norm()).collect();
    let best = norms.iter().cloned().fold(0.0, f64::max);
    if best < 1e-8 {
        return None;
    }
    let j = norms.iter().position(|&x| x >= 0.5 * best)?;
    let v = column(p, j);
    let nv = v.norm();
    Some(v.unscale(nv))
}

/// Smallest subspace of column vectors containing `v` and invariant under `A`.
pub fn invariant_orbit(a: &MatrixAlgebra, v: &CMatrix, tol: &ToleranceConfig) -> Result<Subspace> {
    let n = a.n();
    let mut orbit = orthonormalize(n, 1, std::slice::from_ref(v), tol)?;
    loop {
        let mut new = Vec::new();
        for b in a.basis() {
            for u in orbit.basis() {
                new.push(b * u);
            }
        }
        let grown = orbit.extend(&new, tol)?;
        if grown.dim() == orbit.dim() {
            return Ok(orbit);
        }
        orbit = grown;
    }
}

fn is_common_eigenvector(a: &MatrixAlgebra, v: &CMatrix, tol: &ToleranceConfig) -> bool {
    a.basis().iter().all(|b| {
        let bv = b * v;
        let lambda = (v.adjoint() * &bv)[(0, 0)];
        tol.is_zero(hs_norm(&(bv - v * lambda)), 10.0 * hs_norm(b))
    })
}

fn stacked(mats: &[CMatrix], n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(mats.len().max(1) * n, n);
    for (k, m) in mats.iter().enumerate() {
        out.view_mut((k * n, 0), (n, n)).copy_from(m);
    }
    out
}

/// Eigenvalues of `r` merged into clusters of width `gap`, each replaced by its mean.
fn clustered_eigenvalues(r: &CMatrix, gap: f64) -> Vec<C64> {
    let mut vals = eigenvalues(r);
    vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for v in vals {
        match clusters.iter_mut().find(|c| c.iter().any(|x| (x - v).norm() <= gap)) {
            Some(c) => c.push(v),
            None => clusters.push(vec![v]),
        }
    }
    clusters
        .into_iter()
        .map(|c| c.iter().sum::<C64>() / C64::new(c.len() as f64, 0.0))
        .collect()
}

/// Eigenspaces of `r`, one per eigenvalue cluster, at the widest gap that yields any.
fn eigen_split(r: &CMatrix, tol: &ToleranceConfig) -> Vec<CMatrix> {
    let scale = 1.0 + r.norm();
    for gap in [1e-3, 1e-6, 1e-9] {
        let spaces: Vec<CMatrix> = clustered_eigenvalues(r, gap * scale)
            .into_iter()
            .map(|lambda| null_space(&(r - identity(r.nrows()) * lambda), tol.eq_tol * 10.0))
            .filter(|ns| ns.ncols() > 0)
            .collect();
        if !spaces.is_empty() {
            return spaces;
        }
    }
    Vec::new()
}

/// A generic element of `A` that depends only on the subspace: the projection of a fixed
/// pseudo-random matrix.
fn generic_element(a: &MatrixAlgebra) -> CMatrix {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0f_a1);
    a.space().project(&random_gaussian(a.n(), a.n(), &mut rng))
}

/// Common eigenvector of a commuting family.
///
/// Eigenspaces of a generic element `c` separate the characters of `A`; inside each, every
/// basis element has a single eigenvalue, so refining by the basis ends at the joint
/// eigenspace whatever the basis. The pick among joint eigenspaces (smallest dimension,
/// then the diagonal of the projection) depends only on `A`.
fn commuting_eigenvector(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Option<CMatrix> {
    let n = a.n();
    let mut leaves = eigen_split(&generic_element(a), tol);
    for b in a.basis() {
        let mut next = Vec::new();
        for q in &leaves {
            let r = q.adjoint() * b * q;
            next.extend(eigen_split(&r, tol).into_iter().map(|ns| q * ns));
        }
        if next.is_empty() {
            return None;
        }
        leaves = next;
    }
    let key = |q: &CMatrix| -> (usize, Vec<i64>) {
        let p = q * q.adjoint();
        (q.ncols(), (0..n).map(|i| -(p[(i, i)].re * 1e6).round() as i64).collect())
    };
    let best = leaves.iter().min_by_key(|q| key(q))?;
    canonical_vector(&(best * best.adjoint()))
}

/// A unit vector `v` with `a v ∈ C v` for every `a ∈ A`, if one is found.
///
/// For a 3-commuting algebra `[A,A]·A = A·[A,A] = 0`, so columns of commutators lie in the
/// common kernel; a commutative algebra is handled by eigenspace refinement.
pub fn common_eigenvector(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Option<CMatrix> {
    let n = a.n();
    if n == 0 {
        return None;
    }
    if a.dim() == 0 {
        return Some(column(&identity(n), 0));
    }
    if let Ok(comm) = commutator_subspace(a, tol) {
        if comm.dim() > 0 {
            let cols = CMatrix::from_fn(n, n * comm.dim(), |i, j| comm.basis()[j / n][(i, j % n)]);
            let p = range_projection(&cols, tol.eq_tol);
            if let Some(v) = canonical_vector(&p) {
                if is_common_eigenvector(a, &v, tol) {
                    return Some(v);
                }
            }
        }
    }
    let kernel = null_space(&stacked(a.basis(), n), tol.eq_tol);
    if kernel.ncols() > 0 {
        if let Some(v) = canonical_vector(&(&kernel * kernel.adjoint())) {
            return Some(v);
        }
    }
    let v = commuting_eigenvector(a, tol)?;
    is_common_eigenvector(a, &v, tol).then_some(v)
}

fn eigen_residual(a: &MatrixAlgebra, v: &CMatrix) -> f64 {
    a.basis()
        .iter()
        .map(|b| {
            let bv = b * v;
            let lambda = (v.adjoint() * &bv)[(0, 0)];
            hs_norm(&(bv - v * lambda))
        })
        .fold(0.0, f64::max)
}

/// Up to two steps of inverse iteration on `Σ (b − λ_b)*(b − λ_b)`, each kept only if it
/// at least halves the eigen-residual. Errors in `v` otherwise compound from stage to stage.
/// A `v` already exact to roundoff is left alone: inside a degenerate joint eigenspace the
/// iteration would only wander.
fn polish_eigenvector(a: &MatrixAlgebra, mut v: CMatrix) -> CMatrix {
    let n = a.n();
    let scale = a.basis().iter().map(hs_norm).fold(1.0, f64::max);
    let mut best = eigen_residual(a, &v);
    for _ in 0..2 {
        if best <= 1e-12 * scale {
            break;
        }
        let mut g = CMatrix::zeros(n, n);
        for b in a.basis() {
            let lambda = (v.adjoint() * b * &v)[(0, 0)];
            let d = b - identity(n) * lambda;
            g += d.adjoint() * &d;
        }
        let shift = 1e-12 * (1.0 + g.norm());
        let Some(w) = (g + identity(n) * C64::new(shift, 0.0)).lu().solve(&v) else {
            break;
        };
        let nw = w.norm();
        if !nw.is_finite() || nw == 0.0 {
            break;
        }
        let w = w.unscale(nw);
        let res = eigen_residual(a, &w);
        if res > 0.5 * best {
            break;
        }
        (v, best) = (w, res);
    }
    v
}

#[derive(Debug, Clone)]
pub struct TriangularizationResult {
    pub unitary: CMatrix,
    /// Largest strictly-lower entry of `U* b U` over the basis.
    pub residual: f64,
    pub three_commutative: bool,
}

#[derive(Debug, Clone)]
pub enum TriangularizeOutcome {
    Success(TriangularizationResult),
    /// No common eigenvector was found for the compression at this stage (0-based).
    Fail { stage: usize },
}

impl TriangularizeOutcome {
    pub fn success(self) -> Option<TriangularizationResult> {
        match self {
            Self::Success(r) => Some(r),
            Self::Fail { .. } => None,
        }
    }
}

pub fn lower_residual(u: &CMatrix, basis: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for b in basis {
        let c = u.adjoint() * b * u;
        for j in 0..c.ncols() {
            for i in j + 1..c.nrows() {
                worst = worst.max(c[(i, j)].norm());
            }
        }
    }
    worst
}

/// Build an orthonormal flag of common eigenvectors of successive compressions.
pub fn triangularize(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<TriangularizeOutcome> {
    let n = a.n();
    let three = is_three_commutative(a, tol);
    let mut flag: Vec<CMatrix> = Vec::with_capacity(n);
    let mut k = identity(n);
    for stage in 0..n {
        let dim = k.ncols();
        let compressed: Vec<CMatrix> = a.basis().iter().map(|b| k.adjoint() * b * &k).collect();
        let r = generate_algebra(dim, &compressed, false, tol)?;
        let Some(v) = common_eigenvector(&r, tol) else {
            return Ok(TriangularizeOutcome::Fail { stage });
        };
        let v = polish_eigenvector(&r, v);
        flag.push(&k * &v);
        let rest = null_space(&v.adjoint(), tol.eq_tol);
        k = &k * rest;
    }
    let u = CMatrix::from_fn(n, n, |i, j| flag[j][(i, 0)]);
    let residual = lower_residual(&u, a.basis());
    Ok(TriangularizeOutcome::Success(TriangularizationResult {
        unitary: u,
        residual,
        three_commutative: three,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictReport {
    pub strict: bool,
    pub nilpotent_dim: usize,
}

/// After triangularizing `A`, the nilpotent summand `K` of the split has zero diagonal.
pub fn nilpotent_part_strict(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<StrictReport> {
    let k = match wedderburn_split(a, tol)? {
        WedderburnSplit::RadicalOnly => a.clone(),
        WedderburnSplit::Split { k, .. } => k,
    };
    let Some(tri) = triangularize(a, tol)?.success() else {
        return Ok(StrictReport {
            strict: false,
            nilpotent_dim: k.dim(),
        });
    };
    let u = &tri.unitary;
    let strict = k.basis().iter().all(|b| {
        let c = u.adjoint() * b * u;
        (0..c.nrows()).all(|i| c[(i, i)].norm() <= tol.eq_tol * 10.0 * (1.0 + hs_norm(b)))
    });
    Ok(StrictReport {
        strict,
        nilpotent_dim: k.dim(),
    })
}
