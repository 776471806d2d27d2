//! Completely bounded maps: Choi matrices, complete contractivity and isometry,
//! symmetry of operator spaces, and operator-norm minimization over affine sets.
//!
//! Complete contractivity of `φ : S → M_{p,q}` is decided with the Paulsen off-diagonal
//! program: `‖φ‖_cb ≤ t` iff some extension `φ̃` of `φ` to the whole matrix space has
//! `[[P, J], [J*, Q]] ⪰ 0` with `J = Σ E_ij ⊗ φ̃(E_ij)` and both partial traces
//! `Tr₁ P`, `Tr₁ Q` bounded by `t·I`. The program is solved by interior point; a
//! FEASIBLE verdict is only issued after the solver output has been repaired into an
//! exact certificate. INFEASIBLE verdicts always carry an explicit amplified element.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, op_norm, svd, range_basis, real_lstsq, real_null_space, CMatrix, LinearMapOnSubspace,
    RMatrix, Subspace, ToleranceConfig, C64, I, ONE, ZERO,
};
use crate::sdp::{ComplexSdp, HermSparse, SdpOptions};

/// Largest number of scalar constraints handed to the interior-point solver.
pub const SDP_SIZE_CAP: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    /// PSD certificate (FEASIBLE) or violating block matrix (INFEASIBLE).
    pub witness: Option<CMatrix>,
    /// Constraint residual of the certificate, or `ratio − 1` of the violation.
    pub residual: f64,
    /// Certified upper bound on the cb norm, when the program was solved.
    pub upper_bound: Option<f64>,
    /// Best lower bound on the cb norm found by explicit amplification.
    pub lower_bound: f64,
    /// Matrix level `(k1, k2)` of the violating element.
    pub level: Option<(usize, usize)>,
}

impl FeasibilityOutcome {
    fn feasible(witness: Option<CMatrix>, residual: f64, ub: f64) -> Self {
        Self {
            status: FeasibilityStatus::Feasible,
            witness,
            residual,
            upper_bound: Some(ub),
            lower_bound: 0.0,
            level: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == FeasibilityStatus::Infeasible
    }
}

/// Choi matrix `Σ E_ij ⊗ φ(E_ij)` of a map defined on all of `M_{m,n}`.
pub fn choi(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> Result<CMatrix> {
    let (m, n) = phi.domain().shape();
    if phi.domain().dim() != m * n {
        return Err(Error::DomainNotFull);
    }
    let (p, q) = phi.out_shape();
    let mut out = CMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let e = crate::linalg::unit(m, n, i, j);
            let img = phi.apply(&e, tol)?;
            out.view_mut((i * p, j * q), (p, q)).copy_from(&img);
        }
    }
    Ok(out)
}

/// Complete positivity via positive semidefiniteness of the Choi matrix.
pub fn is_completely_positive(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> Result<bool> {
    let c = choi(phi, tol)?;
    if !c.is_square() {
        return Ok(false);
    }
    let scale = c.norm();
    if !tol.is_zero((&c - c.adjoint()).norm(), scale) {
        return Ok(false);
    }
    let (vals, _) = eigh(&c);
    Ok(vals.first().map_or(true, |&l| l >= -tol.psd_tol * (1.0 + scale)))
}

// ---------------------------------------------------------------------------
// Support compression
// ---------------------------------------------------------------------------

/// Isometries `(L, R)` with `x = L L* x R R*` for every `x` in the family.
fn supports(mats: &[CMatrix], rows: usize, cols: usize, tol: &ToleranceConfig) -> (CMatrix, CMatrix) {
    let row_support = coordinate_or_range(rows, mats.iter().map(|m| m.clone()).collect(), tol);
    let col_support = coordinate_or_range(cols, mats.iter().map(|m| m.adjoint()).collect(), tol);
    (row_support, col_support)
}

/// Coordinate selection when the joint column space is coordinate aligned, else an SVD basis.
fn coordinate_or_range(dim: usize, mats: Vec<CMatrix>, tol: &ToleranceConfig) -> CMatrix {
    let total: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut stacked = CMatrix::zeros(dim, total.max(1));
    let mut off = 0;
    let mut scale: f64 = 0.0;
    for m in &mats {
        stacked.view_mut((0, off), (dim, m.ncols())).copy_from(m);
        off += m.ncols();
        scale = scale.max(m.norm());
    }
    let range = range_basis(&stacked, tol.eq_tol);
    let floor = tol.eq_tol * scale.max(1.0) * 1e-3;
    let rows: Vec<usize> = (0..dim)
        .filter(|&i| stacked.row(i).iter().any(|z| z.norm() > floor))
        .collect();
    if rows.len() == range.ncols() {
        let mut sel = CMatrix::zeros(dim, rows.len());
        for (k, &i) in rows.iter().enumerate() {
            sel[(i, k)] = ONE;
        }
        sel
    } else {
        range
    }
}

fn compress(x: &CMatrix, l: &CMatrix, r: &CMatrix) -> CMatrix {
    l.adjoint() * x * r
}

/// Row-reduced basis of the span of `mats` (same span), with the matching images.
fn sparse_basis(mats: &[CMatrix], imgs: &[CMatrix]) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let d = mats.len();
    if d == 0 {
        return (Vec::new(), Vec::new());
    }
    let (r, c) = mats[0].shape();
    let nn = r * c;
    let mut rows: Vec<Vec<C64>> = mats.iter().map(|m| m.transpose().as_slice().to_vec()).collect();
    let mut rhs: Vec<CMatrix> = imgs.to_vec();
    let mut pivot_row = 0;
    for col in 0..nn {
        if pivot_row == d {
            break;
        }
        let (best, mag) = (pivot_row..d)
            .map(|i| (i, rows[i][col].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 1e-10 {
            continue;
        }
        rows.swap(pivot_row, best);
        rhs.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        for v in rows[pivot_row].iter_mut() {
            *v /= p;
        }
        rhs[pivot_row] /= p;
        for i in 0..d {
            if i != pivot_row {
                let f = rows[i][col];
                if f.norm() > 0.0 {
                    let pr = rows[pivot_row].clone();
                    for (v, w) in rows[i].iter_mut().zip(pr) {
                        *v -= f * w;
                    }
                    let pi = rhs[pivot_row].clone();
                    rhs[i] -= pi * f;
                }
            }
        }
        pivot_row += 1;
    }
    let basis = rows
        .into_iter()
        .take(pivot_row)
        .map(|row| {
            // rows were built from row-major flattening
            CMatrix::from_fn(r, c, |i, j| {
                let v = row[i * c + j];
                if v.norm() < 1e-13 {
                    ZERO
                } else {
                    v
                }
            })
        })
        .collect();
    rhs.truncate(pivot_row);
    (basis, rhs)
}

// ---------------------------------------------------------------------------
// Complete contractivity
// ---------------------------------------------------------------------------

struct Compressed {
    s: Vec<CMatrix>,
    imgs: Vec<CMatrix>,
    r: usize,
    c: usize,
    a: usize,
    b: usize,
}

fn compressed(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> Compressed {
    let (m, n) = phi.domain().shape();
    let (p, q) = phi.out_shape();
    let (l, r) = supports(phi.domain().basis(), m, n, tol);
    let (la, rb) = supports(phi.images(), p, q, tol);
    let s: Vec<CMatrix> = phi.domain().basis().iter().map(|x| compress(x, &l, &r)).collect();
    let imgs: Vec<CMatrix> = phi.images().iter().map(|x| compress(x, &la, &rb)).collect();
    Compressed {
        r: l.ncols(),
        c: r.ncols(),
        a: la.ncols(),
        b: rb.ncols(),
        s,
        imgs,
    }
}

/// Number of scalar constraints of the Paulsen program for `phi`.
pub fn cb_program_size(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> usize {
    let c = compressed(phi, tol);
    2 * c.s.len() * c.a * c.b + c.a * c.a + c.b * c.b
}

/// Rigorous upper bound on `‖φ‖_cb` from the Paulsen program, with the repaired certificate.
fn sdp_upper_bound(cm: &Compressed, tol: &ToleranceConfig) -> Option<(f64, CMatrix)> {
    let (r, c, a, b) = (cm.r, cm.c, cm.a, cm.b);
    let ra = r * a;
    let big = ra + c * b;
    let mut sdp = ComplexSdp::new(vec![big, a, b, 1]);
    sdp.c.add(3, 0, 0, ONE);

    let (rows, targets) = sparse_basis(&cm.s, &cm.imgs);
    for (row, target) in rows.iter().zip(&targets) {
        for al in 0..a {
            for be in 0..b {
                let mut re = HermSparse::new();
                let mut im = HermSparse::new();
                for i in 0..r {
                    for j in 0..c {
                        let coef = row[(i, j)];
                        if coef == ZERO {
                            continue;
                        }
                        let u = i * a + al;
                        let v = ra + j * b + be;
                        re.add(0, v, u, coef * 0.5);
                        im.add(0, v, u, coef * (-I) * 0.5);
                    }
                }
                let t = target[(al, be)];
                sdp.add_constraint(re, t.re);
                sdp.add_constraint(im, t.im);
            }
        }
    }
    // S₁ + Tr₁ P − t I = 0 and S₂ + Tr₁ Q − t I = 0
    for (blk, k, inner, off) in [(1usize, a, r, 0usize), (2, b, c, ra)] {
        for x in 0..k {
            for y in x..k {
                if x == y {
                    let mut h = HermSparse::new();
                    for i in 0..inner {
                        h.add(0, off + i * k + x, off + i * k + x, ONE);
                    }
                    h.add(blk, x, x, ONE);
                    h.add(3, 0, 0, -ONE);
                    sdp.add_constraint(h, 0.0);
                } else {
                    let mut re = HermSparse::new();
                    let mut im = HermSparse::new();
                    for i in 0..inner {
                        re.add(0, off + i * k + y, off + i * k + x, C64::new(0.5, 0.0));
                        im.add(0, off + i * k + y, off + i * k + x, C64::new(0.0, -0.5));
                    }
                    re.add(blk, y, x, C64::new(0.5, 0.0));
                    im.add(blk, y, x, C64::new(0.0, -0.5));
                    sdp.add_constraint(re, 0.0);
                    sdp.add_constraint(im, 0.0);
                }
            }
        }
    }
    let opts = SdpOptions {
        tol: 1e-10,
        max_iter: tol.max_iter.min(200),
    };
    let sol = sdp.solve(&opts);
    let x = &sol.x[0];
    if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let mut xh = (x + x.adjoint()).scale(0.5);

    // repair J so that it reproduces φ exactly on S (orthonormal compressed basis)
    let mut jblk = xh.view((0, ra), (ra, c * b)).into_owned();
    for (s, img) in cm.s.iter().zip(&cm.imgs) {
        let mut got = CMatrix::zeros(a, b);
        for i in 0..r {
            for j in 0..c {
                if s[(i, j)] != ZERO {
                    got += jblk.view((i * a, j * b), (a, b)) * s[(i, j)];
                }
            }
        }
        let defect = img - got;
        for i in 0..r {
            for j in 0..c {
                let w = s[(i, j)].conj();
                if w != ZERO {
                    let mut blk = jblk.view_mut((i * a, j * b), (a, b));
                    blk += &defect * w;
                }
            }
        }
    }
    xh.view_mut((0, ra), (ra, c * b)).copy_from(&jblk);
    xh.view_mut((ra, 0), (c * b, ra)).copy_from(&jblk.adjoint());

    let (vals, _) = eigh(&xh);
    let delta = (-vals.first().copied().unwrap_or(0.0)).max(0.0);
    let partial = |off: usize, inner: usize, k: usize| {
        let mut t = CMatrix::zeros(k, k);
        for i in 0..inner {
            t += xh.view((off + i * k, off + i * k), (k, k));
        }
        t
    };
    let tp = partial(0, r, a);
    let tq = partial(ra, c, b);
    let lp = eigh(&tp).0.last().copied().unwrap_or(0.0) + r as f64 * delta;
    let lq = eigh(&tq).0.last().copied().unwrap_or(0.0) + c as f64 * delta;
    for i in 0..big {
        xh[(i, i)] += C64::new(delta, 0.0);
    }
    Some((lp.max(lq), xh))
}

/// Best ratio `‖φ^{(k)}(X)‖ / ‖X‖` found by local ascent from structured and random seeds.
///
/// Returns `(ratio, coefficients C_l)` so that `X = Σ C_l ⊗ s_l`.
fn violation_search(cm: &Compressed, seed: u64) -> (f64, Vec<CMatrix>) {
    let d = cm.s.len();
    let mut seeds: Vec<Vec<CMatrix>> = vec![
        cm.s.iter().map(|s| s.map(|z| z.conj())).collect(),
        cm.s.iter().map(|s| s.adjoint()).collect(),
        cm.imgs.iter().map(|s| s.map(|z| z.conj())).collect(),
        cm.imgs.iter().map(|s| s.adjoint()).collect(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = cm.a.max(cm.b).clamp(1, 4);
    for k in 1..=kmax {
        for _ in 0..3 {
            seeds.push(
                (0..d)
                    .map(|_| {
                        CMatrix::from_fn(k, k, |_, _| {
                            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                        })
                    })
                    .collect(),
            );
        }
    }
    let mut best = (0.0, seeds[0].clone());
    for s in seeds {
        if s.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        let (ratio, coeffs) = ascend(cm, s);
        if ratio > best.0 {
            best = (ratio, coeffs);
        }
    }
    best
}

fn eval_ratio(cm: &Compressed, coeffs: &[CMatrix]) -> (f64, f64, CMatrix, CMatrix) {
    let num = crate::linalg::kron_sum(coeffs, &cm.imgs);
    let den = crate::linalg::kron_sum(coeffs, &cm.s);
    let nn = op_norm(&num);
    let dn = op_norm(&den);
    (nn, dn, num, den)
}

/// `conj(u_i* B_l v_j)` for the top singular pair of `Σ C_l ⊗ B_l`.
fn norm_gradient(m: &CMatrix, family: &[CMatrix], k1: usize, k2: usize) -> Vec<CMatrix> {
    let (p, q) = family[0].shape();
    let d = svd(m);
    let u = d.u.column(0).into_owned();
    let v = d.v.column(0).into_owned();
    family
        .iter()
        .map(|b| {
            CMatrix::from_fn(k1, k2, |i, j| {
                let ui = u.rows(i * p, p);
                let vj = v.rows(j * q, q);
                (ui.adjoint() * b * vj)[(0, 0)].conj()
            })
        })
        .collect()
}

fn ascend(cm: &Compressed, mut coeffs: Vec<CMatrix>) -> (f64, Vec<CMatrix>) {
    let (k1, k2) = coeffs[0].shape();
    let normalize = |c: &mut Vec<CMatrix>| {
        let n: f64 = c.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
        if n > 0.0 {
            for x in c.iter_mut() {
                *x /= C64::new(n, 0.0);
            }
        }
    };
    normalize(&mut coeffs);
    let (mut nn, mut dn, mut num, mut den) = eval_ratio(cm, &coeffs);
    if dn == 0.0 {
        return (0.0, coeffs);
    }
    let mut step = 0.1;
    for _ in 0..150 {
        let gn = norm_gradient(&num, &cm.imgs, k1, k2);
        let gd = norm_gradient(&den, &cm.s, k1, k2);
        let grad: Vec<CMatrix> = gn
            .iter()
            .zip(&gd)
            .map(|(a, b)| a / C64::new(nn.max(1e-300), 0.0) - b / C64::new(dn, 0.0))
            .collect();
        let gnorm: f64 = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let cur = (nn / dn).ln();
        let mut improved = false;
        for _ in 0..20 {
            let mut trial: Vec<CMatrix> = coeffs
                .iter()
                .zip(&grad)
                .map(|(c, g)| c + g * C64::new(step / gnorm, 0.0))
                .collect();
            normalize(&mut trial);
            let (tn, td, tnum, tden) = eval_ratio(cm, &trial);
            if td > 0.0 && tn > 0.0 && (tn / td).ln() > cur + 1e-14 {
                coeffs = trial;
                (nn, dn, num, den) = (tn, td, tnum, tden);
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (nn / dn, coeffs)
}

/// Lower and upper bounds on `‖φ‖_cb`; the upper bound is `None` beyond the size cap.
pub fn cb_norm_bounds(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> (f64, Option<f64>) {
    if phi.images().iter().all(|x| x.norm() == 0.0) {
        return (0.0, Some(0.0));
    }
    let cm = compressed(phi, tol);
    let (lower, _) = violation_search(&cm, 7);
    let size = 2 * cm.s.len() * cm.a * cm.b + cm.a * cm.a + cm.b * cm.b;
    let upper = if size <= SDP_SIZE_CAP {
        sdp_upper_bound(&cm, tol).map(|x| x.0)
    } else {
        None
    };
    (lower, upper)
}

/// Decide `‖φ‖_cb ≤ 1` within `sdp_tol`.
pub fn is_completely_contractive(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> FeasibilityOutcome {
    if phi.domain().is_zero() || phi.images().iter().all(|x| x.norm() == 0.0) {
        return FeasibilityOutcome::feasible(None, 0.0, 0.0);
    }
    let cm = compressed(phi, tol);
    let size = 2 * cm.s.len() * cm.a * cm.b + cm.a * cm.a + cm.b * cm.b;
    let mut upper = None;
    if size <= SDP_SIZE_CAP {
        if let Some((ub, cert)) = sdp_upper_bound(&cm, tol) {
            if ub <= 1.0 + tol.sdp_tol {
                return FeasibilityOutcome::feasible(Some(cert), (ub - 1.0).max(0.0), ub);
            }
            upper = Some(ub);
        }
    }
    let (ratio, coeffs) = violation_search(&cm, 0x5eed);
    if ratio > 1.0 + tol.sdp_tol {
        let x = crate::linalg::kron_sum(&coeffs, phi.domain().basis());
        let level = coeffs[0].shape();
        return FeasibilityOutcome {
            status: FeasibilityStatus::Infeasible,
            witness: Some(x),
            residual: ratio - 1.0,
            upper_bound: upper,
            lower_bound: ratio,
            level: Some(level),
        };
    }
    FeasibilityOutcome {
        status: FeasibilityStatus::Undecided,
        witness: None,
        residual: upper.map_or(f64::NAN, |u| u - 1.0),
        upper_bound: upper,
        lower_bound: ratio,
        level: None,
    }
}

/// Both `φ` and its inverse on the image are completely contractive.
pub fn is_complete_isometry(phi: &LinearMapOnSubspace, tol: &ToleranceConfig) -> Result<FeasibilityOutcome> {
    if !phi.is_injective(tol)? {
        return Err(Error::NotInjective);
    }
    let inv = phi.inverse(tol)?;
    let fwd = is_completely_contractive(phi, tol);
    if fwd.is_infeasible() {
        return Ok(fwd);
    }
    let back = is_completely_contractive(&inv, tol);
    if back.is_infeasible() {
        return Ok(back);
    }
    if fwd.is_feasible() && back.is_feasible() {
        let residual = fwd.residual.max(back.residual);
        let ub = fwd.upper_bound.unwrap_or(0.0).max(back.upper_bound.unwrap_or(0.0));
        return Ok(FeasibilityOutcome::feasible(fwd.witness, residual, ub));
    }
    Ok(FeasibilityOutcome {
        status: FeasibilityStatus::Undecided,
        witness: None,
        residual: fwd.residual.max(back.residual),
        upper_bound: None,
        lower_bound: fwd.lower_bound.max(back.lower_bound),
        level: None,
    })
}

/// The transpose map on `S` is a complete isometry onto `Sᵀ`.
pub fn is_symmetric_space(s: &Subspace, tol: &ToleranceConfig) -> Result<FeasibilityOutcome> {
    if s.rows() != s.cols() {
        return Err(Error::NotSquare(s.rows(), s.cols()));
    }
    if s.is_zero() {
        return Ok(FeasibilityOutcome::feasible(None, 0.0, 0.0));
    }
    let tr = LinearMapOnSubspace::transpose_map(s);
    // transpose is the identity on spaces of symmetric matrices
    if s.basis().iter().all(|b| (b - b.transpose()).norm() <= tol.eq_tol) {
        return Ok(FeasibilityOutcome::feasible(None, 0.0, 1.0));
    }
    is_complete_isometry(&tr, tol)
}

// ---------------------------------------------------------------------------
// Operator-norm minimization over affine sets
// ---------------------------------------------------------------------------

/// Real-linear equations `L(w) = rhs` on a variable `w` ranging over a subspace.
///
/// Coordinates: `w = Σ_l (x_{2l} + i x_{2l+1}) v_l` for the orthonormal basis `v_l`.
#[derive(Debug, Clone)]
pub struct AffineSystem {
    space: Subspace,
    matrix: RMatrix,
    rhs: DVector<f64>,
}

fn split_real(v: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    out.extend(v.iter().map(|z| z.re));
    out.extend(v.iter().map(|z| z.im));
    out
}

impl AffineSystem {
    /// Build from a real-linear map `f` (evaluated on `v_l` and `i·v_l`) and its target.
    pub fn from_real_linear<F>(space: &Subspace, f: F, target: &[C64]) -> Self
    where
        F: Fn(&CMatrix) -> Vec<C64>,
    {
        let d = space.dim();
        let rows = 2 * target.len();
        let mut matrix = RMatrix::zeros(rows, 2 * d);
        for (l, v) in space.basis().iter().enumerate() {
            let a = split_real(&f(v));
            let b = split_real(&f(&(v * I)));
            for r in 0..rows {
                matrix[(r, 2 * l)] = a[r];
                matrix[(r, 2 * l + 1)] = b[r];
            }
        }
        Self {
            space: space.clone(),
            matrix,
            rhs: DVector::from_vec(split_real(target)),
        }
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn element(&self, x: &[f64]) -> CMatrix {
        let coeffs: Vec<C64> = (0..self.space.dim())
            .map(|l| C64::new(x[2 * l], x[2 * l + 1]))
            .collect();
        self.space.from_coords(&coeffs)
    }
}

#[derive(Debug, Clone)]
pub struct AffineMin {
    pub min_norm: f64,
    pub argmin: CMatrix,
    /// Real dimension of the affine solution set.
    pub affine_dim: usize,
    pub residual: f64,
    /// Directions spanning the solution set (as matrices).
    pub directions: Vec<CMatrix>,
    /// `false` when the norm minimization was skipped (size cap) and `argmin` is only
    /// the least-squares particular solution.
    pub optimized: bool,
}

#[derive(Debug, Clone)]
pub enum AffineOutcome {
    Solved(AffineMin),
    Inconsistent { residual: f64 },
}

/// Minimize the operator norm over the solution set of an affine system.
pub fn min_opnorm_affine(sys: &AffineSystem, tol: &ToleranceConfig) -> AffineOutcome {
    let m = &sys.matrix;
    let x0 = real_lstsq(m, &sys.rhs, tol.eq_tol);
    let residual = if m.ncols() == 0 {
        sys.rhs.norm()
    } else {
        (m * &x0 - &sys.rhs).norm()
    };
    if residual > tol.eq_tol * sys.rhs.norm().max(1.0) {
        return AffineOutcome::Inconsistent { residual };
    }
    let ns = if m.ncols() == 0 {
        RMatrix::zeros(0, 0)
    } else {
        real_null_space(m, tol.eq_tol)
    };
    let w0 = if m.ncols() == 0 {
        CMatrix::zeros(sys.space.rows(), sys.space.cols())
    } else {
        sys.element(x0.as_slice())
    };
    let directions: Vec<CMatrix> = (0..ns.ncols())
        .map(|k| sys.element(ns.column(k).as_slice()))
        .collect();
    let q = directions.len();
    if q == 0 {
        return AffineOutcome::Solved(AffineMin {
            min_norm: op_norm(&w0),
            argmin: w0,
            affine_dim: 0,
            residual,
            directions,
            optimized: true,
        });
    }
    if q + 1 > SDP_SIZE_CAP {
        return AffineOutcome::Solved(AffineMin {
            min_norm: op_norm(&w0),
            argmin: w0,
            affine_dim: q,
            residual,
            directions,
            optimized: false,
        });
    }

    let (m_rows, n_cols) = sys.space.shape();
    let mut family = directions.clone();
    family.push(w0.clone());
    let (l, r) = supports(&family, m_rows, n_cols, tol);
    let (rr, cc) = (l.ncols(), r.ncols());
    if rr == 0 || cc == 0 {
        return AffineOutcome::Solved(AffineMin {
            min_norm: 0.0,
            argmin: CMatrix::zeros(m_rows, n_cols),
            affine_dim: q,
            residual,
            directions,
            optimized: true,
        });
    }
    let mut sdp = ComplexSdp::new(vec![rr + cc]);
    let w0c = compress(&w0, &l, &r);
    for i in 0..rr {
        for j in 0..cc {
            sdp.c.add(0, i, rr + j, w0c[(i, j)]);
        }
    }
    for dir in &directions {
        let dc = compress(dir, &l, &r);
        let mut h = HermSparse::new();
        for i in 0..rr {
            for j in 0..cc {
                h.add(0, i, rr + j, -dc[(i, j)]);
            }
        }
        sdp.add_constraint(h, 0.0);
    }
    let mut ht = HermSparse::new();
    for i in 0..rr + cc {
        ht.add(0, i, i, -ONE);
    }
    sdp.add_constraint(ht, -1.0);
    let sol = sdp.solve(&SdpOptions {
        tol: 1e-11,
        max_iter: tol.max_iter.min(200),
    });
    let mut argmin = w0.clone();
    for (dir, &y) in directions.iter().zip(&sol.y) {
        argmin += dir * C64::new(y, 0.0);
    }
    let (argmin, min_norm) = {
        let cand = op_norm(&argmin);
        let base = op_norm(&w0);
        if cand.is_finite() && cand <= base {
            (argmin, cand)
        } else {
            (w0, base)
        }
    };
    AffineOutcome::Solved(AffineMin {
        min_norm,
        argmin,
        affine_dim: q,
        residual,
        directions,
        optimized: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, orthonormalize, unit};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn e(n: usize, i: usize, j: usize) -> CMatrix {
        unit(n, n, i - 1, j - 1)
    }

    fn ex1_space() -> Subspace {
        let u = e(4, 1, 3) + e(4, 2, 4);
        let v = e(4, 1, 2) - e(4, 3, 4);
        let uv = &u * &v;
        orthonormalize(4, 4, &[u, v, uv], &tol()).unwrap()
    }

    #[test]
    fn choi_examples() {
        let t = tol();
        let full = Subspace::full(2, 2);
        let id = LinearMapOnSubspace::identity(&full);
        let c = choi(&id, &t).unwrap();
        let (vals, _) = eigh(&c);
        assert!((vals[3] - 2.0).abs() < 1e-12 && vals[0].abs() < 1e-12);
        let tr = LinearMapOnSubspace::transpose_map(&full);
        let (vals, _) = eigh(&choi(&tr, &t).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let z = LinearMapOnSubspace::zero(&full, 2, 2);
        assert!(choi(&z, &t).unwrap().norm() == 0.0);
        let partial = orthonormalize(2, 2, &[e(2, 1, 1)], &t).unwrap();
        assert!(matches!(
            choi(&LinearMapOnSubspace::identity(&partial), &t),
            Err(Error::DomainNotFull)
        ));
        assert!(is_completely_positive(&id, &t).unwrap());
        assert!(!is_completely_positive(&tr, &t).unwrap());
    }

    #[test]
    fn identity_is_completely_contractive() {
        let t = tol();
        let id = LinearMapOnSubspace::identity(&Subspace::full(2, 2));
        let out = is_completely_contractive(&id, &t);
        assert!(out.is_feasible(), "{out:?}");
        let id = LinearMapOnSubspace::identity(&ex1_space());
        assert!(is_completely_contractive(&id, &t).is_feasible());
    }

    #[test]
    fn transpose_on_m2_is_not_contractive() {
        let t = tol();
        let tr = LinearMapOnSubspace::transpose_map(&Subspace::full(2, 2));
        let out = is_completely_contractive(&tr, &t);
        assert!(out.is_infeasible());
        assert!(out.lower_bound >= 2.0 - 1e-6);
        let x = out.witness.unwrap();
        let (k1, k2) = out.level.unwrap();
        let y = crate::linalg::amplify_rect(&tr, k1, k2, &x, &t).unwrap();
        assert!(op_norm(&y) / op_norm(&x) >= 2.0 - 1e-6);
        let (lo, hi) = cb_norm_bounds(&tr, &t);
        assert!((lo - 2.0).abs() < 1e-6);
        assert!((hi.unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn ex1_transpose_is_complete_isometry() {
        let t = tol();
        let out = is_symmetric_space(&ex1_space(), &t).unwrap();
        assert!(out.is_feasible(), "{out:?}");
        assert!(!is_symmetric_space(&Subspace::full(2, 2), &t).unwrap().is_feasible());
    }

    #[test]
    fn unitary_conjugation_is_complete_isometry() {
        let t = tol();
        let s = ex1_space();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) | (1, 1) => C64::new(c, 0.0),
            (0, 1) => C64::new(0.0, c),
            (1, 0) => C64::new(0.0, c),
            (2, 2) | (3, 3) => ONE,
            _ => ZERO,
        });
        let phi = LinearMapOnSubspace::from_fn(&s, 4, 4, |x| &u * x * u.adjoint()).unwrap();
        assert!(is_complete_isometry(&phi, &t).unwrap().is_feasible());
    }

    #[test]
    fn scaled_identity_bounds() {
        let t = tol();
        let s = ex1_space();
        let phi = LinearMapOnSubspace::from_fn(&s, 4, 4, |x| x * C64::new(1.5, 0.0)).unwrap();
        let out = is_completely_contractive(&phi, &t);
        assert!(out.is_infeasible());
        assert!((out.lower_bound - 1.5).abs() < 1e-6);
    }

    #[test]
    fn affine_examples() {
        let t = tol();
        // w = pq exactly on a zero-dimensional affine set
        let mut pq = CMatrix::zeros(4, 4);
        pq[(1, 1)] = ONE;
        pq[(2, 2)] = ONE;
        let space = Subspace::full(4, 4);
        let sys = AffineSystem::from_real_linear(&space, |w| w.as_slice().to_vec(), pq.as_slice());
        match min_opnorm_affine(&sys, &t) {
            AffineOutcome::Solved(s) => {
                assert_eq!(s.affine_dim, 0);
                assert!((s.min_norm - 1.0).abs() < 1e-12);
                assert!((s.argmin - &pq).norm() < 1e-12);
            }
            _ => panic!(),
        }
        // 0 = 0 on span{e12}
        let sp = orthonormalize(2, 2, &[e(2, 1, 2)], &t).unwrap();
        let sys = AffineSystem::from_real_linear(&sp, |w| vec![w[(0, 0)]], &[ZERO]);
        match min_opnorm_affine(&sys, &t) {
            AffineOutcome::Solved(s) => {
                assert_eq!(s.affine_dim, 2);
                assert!(s.min_norm < 1e-7);
            }
            _ => panic!(),
        }
        // 0·w = 1
        let sys = AffineSystem::from_real_linear(&sp, |_| vec![ZERO], &[ONE]);
        assert!(matches!(min_opnorm_affine(&sys, &t), AffineOutcome::Inconsistent { .. }));
    }

    #[test]
    fn affine_norm_minimum_is_found() {
        let t = tol();
        // w = diag(1, x) with x free: minimum norm 1, attained for |x| ≤ 1
        let sp = orthonormalize(2, 2, &[e(2, 1, 1), e(2, 2, 2)], &t).unwrap();
        let sys = AffineSystem::from_real_linear(&sp, |w| vec![w[(0, 0)]], &[ONE]);
        match min_opnorm_affine(&sys, &t) {
            AffineOutcome::Solved(s) => {
                assert_eq!(s.affine_dim, 2);
                assert!((s.min_norm - 1.0).abs() < 1e-7);
            }
            _ => panic!(),
        }
        // w = [[1, x],[x, 1]]: the minimum is at x = 0 with norm 1
        let sp = orthonormalize(2, 2, &[identity(2), e(2, 1, 2) + e(2, 2, 1)], &t).unwrap();
        let sys = AffineSystem::from_real_linear(&sp, |w| vec![w[(0, 0)]], &[ONE]);
        match min_opnorm_affine(&sys, &t) {
            AffineOutcome::Solved(s) => assert!((s.min_norm - 1.0).abs() < 1e-7, "{}", s.min_norm),
            _ => panic!(),
        }
    }
}
