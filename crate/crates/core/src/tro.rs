//! Ternary rings of operators: generated TRO, linking algebra, support projections,
//! block decomposition, injective envelope and the standard-position embedding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{generate_algebra, MatrixAlgebra};
use crate::cb::{is_completely_contractive, FeasibilityStatus};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, hs_inner, hs_norm, identity, null_space, op_norm, orthonormalize, range_basis, range_projection,
    sqrt_psd, CMatrix, LinearMapOnSubspace, Subspace, ToleranceConfig, C64,
};

/// A subspace `W` with `W W* W ⊆ W`.
#[derive(Debug, Clone)]
pub struct TroSpace {
    space: Subspace,
    closure_residual: f64,
}

impl TroSpace {
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> &[CMatrix] {
        self.space.basis()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.space.shape()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }
}

/// Check ternary closure over all basis triples.
pub fn verify_tro(s: &Subspace, tol: &ToleranceConfig) -> Result<TroSpace> {
    let b = s.basis();
    let d = b.len();
    // measure the residual against whichever of S, S^⊥ has the smaller basis
    let comp = s.complement(tol);
    let residual = |p: &CMatrix| -> f64 {
        if comp.dim() < d {
            comp.basis().iter().map(|c| hs_inner(p, c).norm_sqr()).sum::<f64>().sqrt()
        } else {
            s.residual(p)
        }
    };
    let worst = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for j in 0..d {
                let xy = &b[i] * b[j].adjoint();
                for w in b {
                    let p = &xy * w;
                    let r = residual(&p);
                    worst = worst.max(r);
                    if r > tol.eq_tol * hs_norm(&p).max(1.0) {
                        ok = false;
                    }
                }
            }
            (worst, ok)
        })
        .reduce(|| (0.0, true), |a, b| (a.0.max(b.0), a.1 && b.1));
    if !worst.1 {
        return Err(Error::NotATro(worst.0));
    }
    Ok(TroSpace {
        space: s.clone(),
        closure_residual: worst.0,
    })
}

/// The `*`-algebra generated by the products `x y*` with `x, y ∈ S`.
pub fn linking_algebra(s: &Subspace, tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    let m = s.rows();
    let b = s.basis();
    let mut gens = Vec::with_capacity(b.len() * b.len());
    for x in b {
        for y in b {
            gens.push(x * y.adjoint());
        }
    }
    generate_algebra(m, &gens, true, tol)
}

/// The least TRO containing `S`, computed as `span(L·S)` for the linking algebra `L`.
///
/// Every `x ∈ S` lies in `span{(x x*)^k x : k ≥ 1}`, so `S ⊆ L·S`; the result is then
/// checked for ternary closure.
pub fn generate_tro(s: &Subspace, tol: &ToleranceConfig) -> Result<TroSpace> {
    let (m, n) = s.shape();
    if s.is_zero() {
        return Ok(TroSpace {
            space: Subspace::zero(m, n),
            closure_residual: 0.0,
        });
    }
    let l = linking_algebra(s, tol)?;
    let mut mats: Vec<CMatrix> = s.basis().to_vec();
    for a in l.basis() {
        for x in s.basis() {
            mats.push(a * x);
        }
    }
    let mut w = orthonormalize(m, n, &mats, tol)?;
    // the closure is complete in exact arithmetic; iterate defensively
    for _ in 0..4 {
        match verify_tro(&w, tol) {
            Ok(t) => return Ok(t),
            Err(_) => {
                let b = w.basis().to_vec();
                let mut extra = Vec::new();
                for x in &b {
                    for y in &b {
                        let xy = x * y.adjoint();
                        for z in &b {
                            extra.push(&xy * z);
                        }
                    }
                }
                w = w.extend(&extra, tol)?;
            }
        }
    }
    verify_tro(&w, tol)
}

/// `(p, q)`: projections onto the joint column space and joint row space of `W`.
pub fn support_projections(w: &Subspace, tol: &ToleranceConfig) -> Result<(CMatrix, CMatrix)> {
    let (m, n) = w.shape();
    if w.is_zero() {
        return Ok((CMatrix::zeros(m, m), CMatrix::zeros(n, n)));
    }
    let p = range_projection(&hstack(w.basis(), m), tol.eq_tol);
    let adj: Vec<CMatrix> = w.basis().iter().map(|x| x.adjoint()).collect();
    let q = range_projection(&hstack(&adj, n), tol.eq_tol);
    for x in w.basis() {
        let r = hs_norm(&(&p * x * &q - x));
        if !tol.is_zero(r, hs_norm(x)) {
            return Err(Error::Degenerate(format!("support projections miss an element ({r:.3e})")));
        }
    }
    Ok((p, q))
}

fn hstack(mats: &[CMatrix], rows: usize) -> CMatrix {
    let total: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut out = CMatrix::zeros(rows, total);
    let mut off = 0;
    for m in mats {
        out.view_mut((0, off), (rows, m.ncols())).copy_from(m);
        off += m.ncols();
    }
    out
}

// ---------------------------------------------------------------------------
// Block decomposition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Block {
    /// Abstract block shape `M_{n_k, m_k}`.
    pub n: usize,
    pub m: usize,
    /// Multiplicity: the concrete corner is `rank e_k × rank f_k = (n·mult) × (m·mult)`.
    pub multiplicity: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone)]
pub struct BlockStructure {
    pub blocks: Vec<Block>,
    /// Minimal central projections `e_k` of the linking algebra.
    pub left_projections: Vec<CMatrix>,
    /// Matching right projections `f_k`.
    pub right_projections: Vec<CMatrix>,
    pub left_unitary: CMatrix,
    pub right_unitary: CMatrix,
    /// Basis of `e_k W f_k` for each block.
    pub block_bases: Vec<Subspace>,
    /// Block index of each element of the concatenated block bases.
    pub block_assignment: Vec<usize>,
}

impl BlockStructure {
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.n, b.m)).collect()
    }

    /// `Σ_{k∈K} e_k` and `Σ_{k∈K} f_k`.
    pub fn projections_for(&self, keep: &[usize]) -> (CMatrix, CMatrix) {
        let m = self.left_unitary.nrows();
        let n = self.right_unitary.nrows();
        let mut p = CMatrix::zeros(m, m);
        let mut q = CMatrix::zeros(n, n);
        for &k in keep {
            p += &self.left_projections[k];
            q += &self.right_projections[k];
        }
        (p, q)
    }

    /// Maximum entry of `L* w R` outside the declared diagonal rectangles.
    pub fn off_block_residual(&self, w: &Subspace) -> f64 {
        let mut mask_rows = Vec::new();
        let mut mask_cols = Vec::new();
        let (mut ro, mut co) = (0, 0);
        for b in &self.blocks {
            mask_rows.push((ro, ro + b.rows));
            mask_cols.push((co, co + b.cols));
            ro += b.rows;
            co += b.cols;
        }
        let mut worst: f64 = 0.0;
        for x in w.basis() {
            let y = self.left_unitary.adjoint() * x * &self.right_unitary;
            for i in 0..y.nrows() {
                for j in 0..y.ncols() {
                    let inside = mask_rows
                        .iter()
                        .zip(&mask_cols)
                        .any(|(r, c)| i >= r.0 && i < r.1 && j >= c.0 && j < c.1);
                    if !inside {
                        worst = worst.max(y[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }
}

fn center_basis(l: &MatrixAlgebra, tol: &ToleranceConfig) -> Vec<CMatrix> {
    let b = l.basis();
    let d = b.len();
    let n = l.n();
    let nn = n * n;
    if d == 0 {
        return Vec::new();
    }
    let mut m = CMatrix::zeros(nn * d, d);
    for (k, bk) in b.iter().enumerate() {
        for (i, bi) in b.iter().enumerate() {
            let c = bi * bk - bk * bi;
            for (idx, v) in c.as_slice().iter().enumerate() {
                m[(k * nn + idx, i)] = *v;
            }
        }
    }
    let ns = null_space(&m, tol.eq_tol);
    (0..ns.ncols())
        .map(|c| {
            let coeffs: Vec<C64> = (0..d).map(|i| ns[(i, c)]).collect();
            l.space().from_coords(&coeffs)
        })
        .collect()
}

fn cluster_sorted(vals: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        match out.last_mut() {
            Some(c) if (vals[i] - vals[*c.last().unwrap()]).abs() <= gap => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Minimal central projections of the linking algebra and the resulting rectangular blocks.
pub fn block_decompose(w: &TroSpace, tol: &ToleranceConfig) -> Result<BlockStructure> {
    let (m, n) = w.shape();
    if w.dim() == 0 {
        return Ok(BlockStructure {
            blocks: Vec::new(),
            left_projections: Vec::new(),
            right_projections: Vec::new(),
            left_unitary: identity(m),
            right_unitary: identity(n),
            block_bases: Vec::new(),
            block_assignment: Vec::new(),
        });
    }
    let l = linking_algebra(w.space(), tol)?;
    let (p, q) = support_projections(w.space(), tol)?;
    let center = center_basis(&l, tol);
    let zdim = center.len();
    let mut herm: Vec<CMatrix> = Vec::new();
    for c in &center {
        herm.push((c + c.adjoint()).scale(0.5));
        herm.push((c - c.adjoint()) * C64::new(0.0, 0.5));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    let mut projections: Option<Vec<CMatrix>> = None;
    for _attempt in 0..10 {
        let mut h = &p * C64::new(rng.random_range(1.0..2.0), 0.0);
        for hm in &herm {
            h += hm * C64::new(rng.random_range(-1.0..1.0), 0.0);
        }
        let (vals, vecs) = eigh(&h);
        let weights: Vec<f64> = (0..m)
            .map(|k| (&p * vecs.column(k)).norm_squared())
            .collect();
        if weights.iter().any(|&wt| wt > 1e-6 && wt < 1.0 - 1e-6) {
            continue;
        }
        let inside: Vec<usize> = (0..m).filter(|&k| weights[k] > 0.5).collect();
        let inside_vals: Vec<f64> = inside.iter().map(|&k| vals[k]).collect();
        let spread = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let clusters = cluster_sorted(&inside_vals, 1e-6 * (1.0 + spread));
        if clusters.len() != zdim {
            continue;
        }
        let projs: Vec<CMatrix> = clusters
            .iter()
            .map(|c| {
                let cols: Vec<usize> = c.iter().map(|&i| inside[i]).collect();
                let v = CMatrix::from_fn(m, cols.len(), |r, k| vecs[(r, cols[k])]);
                &v * v.adjoint()
            })
            .collect();
        if projs.iter().all(|e| l.space().contains(e, tol).unwrap_or(false)) {
            projections = Some(projs);
            break;
        }
    }
    let mut es = projections
        .ok_or_else(|| Error::Degenerate("central eigenvalues collided in every retry".into()))?;
    let first_index = |e: &CMatrix| (0..m).find(|&i| e[(i, i)].re > 1e-6).unwrap_or(m);
    es.sort_by_key(first_index);

    let mut blocks = Vec::new();
    let mut fs = Vec::new();
    let mut bases = Vec::new();
    let mut assignment = Vec::new();
    for (k, e) in es.iter().enumerate() {
        let ew: Vec<CMatrix> = w.basis().iter().map(|x| e * x).collect();
        let adj: Vec<CMatrix> = ew.iter().map(|x| x.adjoint()).collect();
        let f = range_projection(&hstack(&adj, n), tol.eq_tol);
        let wk = orthonormalize(m, n, &ew, tol)?;
        let el: Vec<CMatrix> = l.basis().iter().map(|x| e * x).collect();
        let el_dim = orthonormalize(m, m, &el, tol)?.dim();
        let nk = (el_dim as f64).sqrt().round() as usize;
        if nk == 0 || nk * nk != el_dim || wk.dim() % nk != 0 {
            return Err(Error::Degenerate(format!(
                "block {k}: e_k L has dimension {el_dim}, W_k has dimension {}",
                wk.dim()
            )));
        }
        let mk = wk.dim() / nk;
        let rows = e.trace().re.round() as usize;
        let cols = f.trace().re.round() as usize;
        blocks.push(Block {
            n: nk,
            m: mk,
            multiplicity: rows / nk.max(1),
            rows,
            cols,
        });
        assignment.extend(std::iter::repeat(k).take(wk.dim()));
        bases.push(wk);
        fs.push(f);
    }

    let unitary_from = |projs: &[CMatrix], total: &CMatrix, size: usize| {
        let mut cols: Vec<CMatrix> = projs.iter().map(|e| range_basis(e, tol.eq_tol)).collect();
        cols.push(range_basis(&(identity(size) - total), tol.eq_tol));
        hstack(&cols, size)
    };
    let left_unitary = unitary_from(&es, &p, m);
    let right_unitary = unitary_from(&fs, &q, n);
    let bs = BlockStructure {
        blocks,
        left_projections: es,
        right_projections: fs,
        left_unitary,
        right_unitary,
        block_bases: bases,
        block_assignment: assignment,
    };
    let off = bs.off_block_residual(w.space());
    if off > 10.0 * tol.eq_tol * (1.0 + m as f64) {
        return Err(Error::Degenerate(format!("block structure leaks ({off:.3e})")));
    }
    Ok(bs)
}

pub fn is_simple_tro(w: &TroSpace, tol: &ToleranceConfig) -> Result<bool> {
    Ok(block_decompose(w, tol)?.blocks.len() == 1)
}

// ---------------------------------------------------------------------------
// Injective envelope
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnvelopeStatus {
    Exact,
    Candidate,
}

#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub envelope: TroSpace,
    pub status: EnvelopeStatus,
    pub deleted_blocks: Vec<usize>,
    /// `x ↦ P x Q` from the input space into the envelope.
    pub embedding: LinearMapOnSubspace,
    pub left: CMatrix,
    pub right: CMatrix,
    /// Block structure of the generated TRO (before deletion).
    pub structure: BlockStructure,
    /// Deletion subsets whose check came back undecided (treated as invalid).
    pub undecided: Vec<Vec<usize>>,
    pub notes: Vec<String>,
}

impl EnvelopeResult {
    pub fn dims(&self) -> Vec<(usize, usize)> {
        let deleted = &self.deleted_blocks;
        self.structure
            .blocks
            .iter()
            .enumerate()
            .filter(|(k, _)| !deleted.contains(k))
            .map(|(_, b)| (b.n, b.m))
            .collect()
    }
}

enum Validity {
    Valid,
    Invalid,
    Undecided,
}

fn deletion_validity(s: &Subspace, bs: &BlockStructure, del: &[usize], tol: &ToleranceConfig) -> Validity {
    let keep: Vec<usize> = (0..bs.blocks.len()).filter(|k| !del.contains(k)).collect();
    let (pk, qk) = bs.projections_for(&keep);
    let (pd, qd) = bs.projections_for(del);
    let (m, n) = s.shape();
    let Ok(to_kept) = LinearMapOnSubspace::from_fn(s, m, n, |x| &pk * x * &qk) else {
        return Validity::Invalid;
    };
    if !to_kept.is_injective(tol).unwrap_or(false) {
        return Validity::Invalid;
    }
    let Ok(back) = to_kept.inverse(tol) else {
        return Validity::Invalid;
    };
    // ‖x‖ = max(‖x_K‖, ‖x_D‖) at every level, so the compression is completely isometric
    // on S exactly when x_K ↦ x_D is completely contractive
    let Ok(theta) = back.then(m, n, |x| &pd * x * &qd) else {
        return Validity::Invalid;
    };
    match is_completely_contractive(&theta, tol).status {
        FeasibilityStatus::Feasible => Validity::Valid,
        FeasibilityStatus::Infeasible => Validity::Invalid,
        FeasibilityStatus::Undecided => Validity::Undecided,
    }
}

fn subsets_of_size(r: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..r {
            cur.push(k);
            rec(k + 1, r, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, size, &mut Vec::new(), &mut out);
    out
}

/// Injective envelope of `S`: exact when the generated TRO is simple, otherwise the
/// largest block deletion that keeps `S` completely isometrically embedded.
pub fn injective_envelope(s: &Subspace, tol: &ToleranceConfig) -> Result<EnvelopeResult> {
    let w = generate_tro(s, tol)?;
    let bs = block_decompose(&w, tol)?;
    let r = bs.blocks.len();
    let (m, n) = s.shape();
    let all: Vec<usize> = (0..r).collect();

    if r <= 1 {
        let (p, q) = bs.projections_for(&all);
        return Ok(EnvelopeResult {
            envelope: w,
            status: EnvelopeStatus::Exact,
            deleted_blocks: Vec::new(),
            embedding: LinearMapOnSubspace::identity(s),
            left: if r == 0 { identity(m) } else { p },
            right: if r == 0 { identity(n) } else { q },
            structure: bs,
            undecided: Vec::new(),
            notes: vec!["generated TRO is simple".into()],
        });
    }

    let mut valid: Vec<Vec<usize>> = Vec::new();
    let mut undecided = Vec::new();
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for size in 1..r {
        let candidates: Vec<Vec<usize>> = if size == 1 {
            subsets_of_size(r, 1)
        } else {
            subsets_of_size(r, size)
                .into_iter()
                .filter(|c| {
                    (0..c.len()).all(|drop| {
                        let mut sub = c.clone();
                        sub.remove(drop);
                        frontier.contains(&sub)
                    })
                })
                .collect()
        };
        if candidates.is_empty() {
            break;
        }
        let results: Vec<(Vec<usize>, Validity)> = candidates
            .into_par_iter()
            .map(|c| {
                let v = deletion_validity(s, &bs, &c, tol);
                (c, v)
            })
            .collect();
        frontier.clear();
        for (c, v) in results {
            match v {
                Validity::Valid => {
                    frontier.push(c.clone());
                    valid.push(c);
                }
                Validity::Undecided => undecided.push(c),
                Validity::Invalid => {}
            }
        }
        if frontier.is_empty() {
            break;
        }
    }
    valid.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let deleted = valid.first().cloned().unwrap_or_default();
    let keep: Vec<usize> = (0..r).filter(|k| !deleted.contains(k)).collect();
    let (pk, qk) = bs.projections_for(&keep);
    let env_mats: Vec<CMatrix> = w.basis().iter().map(|x| &pk * x * &qk).collect();
    let envelope = verify_tro(&orthonormalize(m, n, &env_mats, tol)?, tol)?;
    let embedding = LinearMapOnSubspace::from_fn(s, m, n, |x| &pk * x * &qk)?;
    let mut notes = vec![format!(
        "generated TRO has {r} blocks; block deletion is a heuristic, envelope not certified"
    )];
    if !undecided.is_empty() {
        notes.push(format!("{} deletion checks undecided", undecided.len()));
    }
    Ok(EnvelopeResult {
        envelope,
        status: EnvelopeStatus::Candidate,
        deleted_blocks: deleted,
        embedding,
        left: pk,
        right: qk,
        structure: bs,
        undecided,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Standard position
// ---------------------------------------------------------------------------

/// `Φ(x) = [[x z*, x(1 − z*z)^{1/2}], [0, 0]]`, checked to be a ternary morphism with
/// `Φ(x)Φ(y) = Φ(x z* y)`.
pub fn standard_position_embed(z_space: &TroSpace, z: &CMatrix, tol: &ToleranceConfig) -> Result<LinearMapOnSubspace> {
    let (m, n) = z_space.shape();
    if z.shape() != (m, n) {
        return Err(Error::ShapeMismatch {
            expected: (m, n),
            got: z.shape(),
        });
    }
    let nz = op_norm(z);
    if nz > 1.0 + tol.eq_tol {
        return Err(Error::OutsideBall(nz));
    }
    if !z_space.space().contains(z, tol)? {
        return Err(Error::NotInDomain(z_space.space().residual(z)));
    }
    let defect = identity(n) - z.adjoint() * z;
    let root = sqrt_psd(&defect, tol)?;
    let zs = z.adjoint();
    let size = m + n;
    let phi_of = |x: &CMatrix| {
        let mut out = CMatrix::zeros(size, size);
        out.view_mut((0, 0), (m, m)).copy_from(&(x * &zs));
        out.view_mut((0, m), (m, n)).copy_from(&(x * &root));
        out
    };
    let phi = LinearMapOnSubspace::from_fn(z_space.space(), size, size, phi_of)?;
    let b = z_space.basis();
    let imgs = phi.images();
    let scale = 10.0 * tol.eq_tol;
    for (i, x) in b.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let prod = &imgs[i] * &imgs[j];
            let want = phi_of(&(x * &zs * y));
            if hs_norm(&(&prod - &want)) > scale * (1.0 + hs_norm(&want)) {
                return Err(Error::Degenerate("Φ(x)Φ(y) ≠ Φ(x z* y)".into()));
            }
            let xy = &imgs[i] * imgs[j].adjoint();
            for (k, w) in b.iter().enumerate() {
                let lhs = &xy * &imgs[k];
                let rhs = phi_of(&(x * y.adjoint() * w));
                if hs_norm(&(&lhs - &rhs)) > scale * (1.0 + hs_norm(&rhs)) {
                    return Err(Error::Degenerate("Φ is not a ternary morphism".into()));
                }
            }
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unit, ONE};

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

    fn pq() -> CMatrix {
        e(4, 2, 2) + e(4, 3, 3)
    }

    #[test]
    fn ex1_generated_tro_is_corner() {
        let t = tol();
        let w = generate_tro(&ex1_space(), &t).unwrap();
        assert_eq!(w.dim(), 9);
        for i in 1..=4 {
            for j in 1..=4 {
                let inside = i <= 3 && j >= 2;
                assert_eq!(w.space().contains(&e(4, i, j), &t).unwrap(), inside, "({i},{j})");
            }
        }
        assert!(is_simple_tro(&w, &t).unwrap());
        let bs = block_decompose(&w, &t).unwrap();
        assert_eq!(bs.shapes(), vec![(3, 3)]);
        let (p, q) = support_projections(w.space(), &t).unwrap();
        assert!((&p - (e(4, 1, 1) + e(4, 2, 2) + e(4, 3, 3))).norm() < 1e-10);
        assert!((&q - (e(4, 2, 2) + e(4, 3, 3) + e(4, 4, 4))).norm() < 1e-10);
        assert!((&p * &q - &q * &p).norm() < 1e-10);
        assert!((&p * &q - pq()).norm() < 1e-10);
    }

    #[test]
    fn ex1_linking_algebra_is_corner() {
        let t = tol();
        let l = linking_algebra(&ex1_space(), &t).unwrap();
        assert_eq!(l.dim(), 9);
        assert!(!l.space().contains(&e(4, 4, 4), &t).unwrap());
    }

    #[test]
    fn strict_upper_envelope_is_corner() {
        let t = tol();
        let s = orthonormalize(3, 3, &[e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)], &t).unwrap();
        let env = injective_envelope(&s, &t).unwrap();
        assert_eq!(env.status, EnvelopeStatus::Exact);
        assert_eq!(env.envelope.dim(), 4);
        for (i, j) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            assert!(env.envelope.space().contains(&e(3, i, j), &t).unwrap());
        }
    }

    #[test]
    fn small_tros() {
        let t = tol();
        let s = orthonormalize(2, 2, &[e(2, 1, 1)], &t).unwrap();
        let w = generate_tro(&s, &t).unwrap();
        assert_eq!(w.dim(), 1);
        let (p, q) = support_projections(w.space(), &t).unwrap();
        assert!((p - e(2, 1, 1)).norm() < 1e-12 && (q - e(2, 1, 1)).norm() < 1e-12);

        let l = linking_algebra(&orthonormalize(2, 2, &[e(2, 1, 2)], &t).unwrap(), &t).unwrap();
        assert_eq!(l.dim(), 1);
        assert!(l.space().contains(&e(2, 1, 1), &t).unwrap());

        let d = generate_tro(&orthonormalize(2, 2, &[e(2, 1, 1), e(2, 2, 2)], &t).unwrap(), &t).unwrap();
        assert_eq!(block_decompose(&d, &t).unwrap().shapes(), vec![(1, 1), (1, 1)]);
        assert!(!is_simple_tro(&d, &t).unwrap());

        let w2 = generate_tro(&orthonormalize(4, 4, &[e(4, 1, 2), e(4, 3, 4)], &t).unwrap(), &t).unwrap();
        let bs = block_decompose(&w2, &t).unwrap();
        assert_eq!(bs.shapes(), vec![(1, 1), (1, 1)]);
        assert!(bs.off_block_residual(w2.space()) < 1e-12);

        let full = verify_tro(&Subspace::full(2, 3), &t).unwrap();
        assert!(is_simple_tro(&full, &t).unwrap());
    }

    #[test]
    fn diagonal_envelope_keeps_all_blocks() {
        let t = tol();
        let s = orthonormalize(2, 2, &[e(2, 1, 1), e(2, 2, 2)], &t).unwrap();
        let env = injective_envelope(&s, &t).unwrap();
        assert_eq!(env.status, EnvelopeStatus::Candidate);
        assert!(env.deleted_blocks.is_empty());
        assert_eq!(env.envelope.dim(), 2);
    }

    #[test]
    fn redundant_block_is_deleted() {
        let t = tol();
        // x ↦ x ⊕ 0.5x: the second copy is redundant
        let a = e(4, 1, 2) + e(4, 3, 4) * C64::new(0.5, 0.0);
        let s = orthonormalize(4, 4, &[a], &t).unwrap();
        let env = injective_envelope(&s, &t).unwrap();
        assert_eq!(env.status, EnvelopeStatus::Candidate);
        assert_eq!(env.deleted_blocks, vec![1]);
        assert_eq!(env.envelope.dim(), 1);
        assert!(env.envelope.space().contains(&e(4, 1, 2), &t).unwrap());
    }

    #[test]
    fn standard_position_examples() {
        let t = tol();
        let w = generate_tro(&ex1_space(), &t).unwrap();
        let phi = standard_position_embed(&w, &pq(), &t).unwrap();
        let a = ex1_space();
        for x in a.basis() {
            for y in a.basis() {
                let prod = phi.apply(x, &t).unwrap() * phi.apply(y, &t).unwrap();
                let corner = prod.view((0, 0), (4, 4)).into_owned();
                let xy = x * y;
                // the (1,1) corner is x z* y z*, which equals x·y·z* on A
                assert!((corner - &xy * pq().adjoint()).norm() < 1e-10);
            }
        }
        let one = verify_tro(&Subspace::full(1, 1), &t).unwrap();
        let phi1 = standard_position_embed(&one, &CMatrix::from_element(1, 1, ONE), &t).unwrap();
        let img = phi1.apply(&CMatrix::from_element(1, 1, ONE), &t).unwrap();
        assert!((img[(0, 0)] - ONE).norm() < 1e-12 && img[(0, 1)].norm() < 1e-12);
        let phi0 = standard_position_embed(&w, &CMatrix::zeros(4, 4), &t).unwrap();
        for x in a.basis() {
            for y in a.basis() {
                assert!((phi0.apply(x, &t).unwrap() * phi0.apply(y, &t).unwrap()).norm() < 1e-12);
            }
        }
        assert!(matches!(
            standard_position_embed(&w, &(pq() * C64::new(2.0, 0.0)), &t),
            Err(Error::OutsideBall(_))
        ));
    }
}
