//! Reversibility decisions: the `z`-solve of the Kaneda–Paulsen correspondence, verdicts,
//! sufficient certificates, the 3-commutative consequences, `Sym(A)` and the blockwise test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{is_anticommuting, is_commutative, MatrixAlgebra};
use crate::cb::{min_opnorm_affine, AffineOutcome, AffineSystem};
use crate::error::{Error, Result};
use crate::linalg::{
    direct_sum, hs_norm, identity, op_norm, orthonormalize, CMatrix, Subspace, ToleranceConfig, C64,
};
use crate::tro::{block_decompose, generate_tro, injective_envelope, EnvelopeStatus, TroSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProductTarget {
    Product,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KpStatus {
    UniqueInBall,
    Found,
    None,
}

#[derive(Debug, Clone)]
pub struct KpSolution {
    pub element: CMatrix,
    /// Largest `‖b_i v* b_j − μ_ij‖` over basis pairs.
    pub residual: f64,
    pub op_norm: f64,
    /// Real dimension of the affine solution set (before the ball constraint).
    pub affine_dim: usize,
    pub status: KpStatus,
    /// `false` if the norm minimization was skipped, so `NONE` is not a proof of absence.
    pub optimized: bool,
    pub inconsistent: bool,
}

impl KpSolution {
    pub fn exists(&self) -> bool {
        self.status != KpStatus::None
    }
}

fn product_table(basis: &[CMatrix], target: ProductTarget) -> Vec<Vec<CMatrix>> {
    basis
        .iter()
        .map(|x| {
            basis
                .iter()
                .map(|y| match target {
                    ProductTarget::Product => x * y,
                    ProductTarget::Reversed => y * x,
                })
                .collect()
        })
        .collect()
}

fn table_residual(basis: &[CMatrix], mu: &[Vec<CMatrix>], v: &CMatrix) -> f64 {
    let vs = v.adjoint();
    let mut worst: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        let xv = x * &vs;
        for (j, y) in basis.iter().enumerate() {
            worst = worst.max(hs_norm(&(&xv * y - &mu[i][j])));
        }
    }
    worst
}

/// Solve `b_i v* b_j = μ_ij` for `v ∈ Z`, then minimize `‖v‖` over the solutions.
pub fn kp_solve_table(
    basis: &[CMatrix],
    mu: &[Vec<CMatrix>],
    z: &Subspace,
    tol: &ToleranceConfig,
) -> Result<KpSolution> {
    let (m, n) = z.shape();
    for b in basis {
        if b.shape() != (m, n) {
            return Err(Error::ShapeMismatch {
                expected: (m, n),
                got: b.shape(),
            });
        }
    }
    let mut target = Vec::new();
    for row in mu {
        for t in row {
            target.extend(t.iter().copied());
        }
    }
    let f = |v: &CMatrix| {
        let vs = v.adjoint();
        let mut out = Vec::with_capacity(target.len());
        for x in basis {
            let xv = x * &vs;
            for y in basis {
                out.extend((&xv * y).iter().copied());
            }
        }
        out
    };
    let sys = AffineSystem::from_real_linear(z, f, &target);
    match min_opnorm_affine(&sys, tol) {
        AffineOutcome::Inconsistent { residual } => Ok(KpSolution {
            element: CMatrix::zeros(m, n),
            residual,
            op_norm: f64::INFINITY,
            affine_dim: 0,
            status: KpStatus::None,
            optimized: true,
            inconsistent: true,
        }),
        AffineOutcome::Solved(sol) => {
            let residual = table_residual(basis, mu, &sol.argmin);
            let norm = sol.min_norm;
            let status = if norm > 1.0 + tol.sdp_tol {
                KpStatus::None
            } else if sol.affine_dim == 0 || leaves_ball(&sol.argmin, &sol.directions, tol) {
                KpStatus::UniqueInBall
            } else {
                KpStatus::Found
            };
            Ok(KpSolution {
                element: sol.argmin,
                residual,
                op_norm: norm,
                affine_dim: sol.affine_dim,
                status,
                optimized: sol.optimized,
                inconsistent: false,
            })
        }
    }
}

/// Every sampled `z ± 0.01 d` (unit `d` in the solution directions) has norm above 1.
fn leaves_ball(z: &CMatrix, dirs: &[CMatrix], tol: &ToleranceConfig) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b70);
    let mut samples: Vec<CMatrix> = dirs.to_vec();
    for _ in 0..8 {
        let mut d = CMatrix::zeros(z.nrows(), z.ncols());
        for dir in dirs {
            let c: f64 = StandardNormal.sample(&mut rng);
            d += dir * C64::new(c, 0.0);
        }
        samples.push(d);
    }
    samples.iter().all(|d| {
        let n = hs_norm(d);
        if n == 0.0 {
            return true;
        }
        let d = d.unscale(n) * C64::new(0.01, 0.0);
        op_norm(&(z + &d)) > 1.0 + tol.eq_tol && op_norm(&(z - &d)) > 1.0 + tol.eq_tol
    })
}

/// `z`-solve for the product or the reversed product of `A` inside `Z`.
pub fn kp_solve(a: &MatrixAlgebra, z: &TroSpace, target: ProductTarget, tol: &ToleranceConfig) -> Result<KpSolution> {
    if a.space().shape() != z.shape() {
        return Err(Error::ShapeMismatch {
            expected: z.shape(),
            got: a.space().shape(),
        });
    }
    let mu = product_table(a.basis(), target);
    kp_solve_table(a.basis(), &mu, z.space(), tol)
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reversible {
    Yes,
    No,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictMethod {
    /// `w = −I` in the ambient matrix algebra.
    Anticommuting,
    /// `w = I` in the ambient matrix algebra.
    Commutative,
    Envelope,
    CompressedEnvelope,
    GeneratedTro,
}

#[derive(Debug, Clone)]
pub struct ReversibilityVerdict {
    pub reversible: Reversible,
    pub method: VerdictMethod,
    pub commutative: bool,
    pub w: Option<KpSolution>,
    pub envelope_status: Option<EnvelopeStatus>,
    pub notes: Vec<String>,
}

/// `z` and `w` inside the envelope, with the coordinates of `A` used there.
#[derive(Debug, Clone)]
pub struct EnvelopeKp {
    pub envelope: TroSpace,
    pub status: EnvelopeStatus,
    pub deleted_blocks: Vec<usize>,
    /// Block shapes of the envelope.
    pub dims: Vec<(usize, usize)>,
    /// Image of the basis of `A` in the envelope's ambient space.
    pub basis: Vec<CMatrix>,
    pub z: KpSolution,
    pub w: KpSolution,
}

pub fn envelope_kp(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<EnvelopeKp> {
    let env = injective_envelope(a.space(), tol)?;
    let basis: Vec<CMatrix> = a.basis().iter().map(|b| &env.left * b * &env.right).collect();
    let compress = |t: Vec<Vec<CMatrix>>| -> Vec<Vec<CMatrix>> {
        t.into_iter()
            .map(|row| row.into_iter().map(|x| &env.left * x * &env.right).collect())
            .collect()
    };
    let mu_p = compress(product_table(a.basis(), ProductTarget::Product));
    let mu_r = compress(product_table(a.basis(), ProductTarget::Reversed));
    let z = kp_solve_table(&basis, &mu_p, env.envelope.space(), tol)?;
    let w = kp_solve_table(&basis, &mu_r, env.envelope.space(), tol)?;
    Ok(EnvelopeKp {
        dims: env.dims(),
        envelope: env.envelope,
        status: env.status,
        deleted_blocks: env.deleted_blocks,
        basis,
        z,
        w,
    })
}

/// Decide whether `A` with the reversed product is an operator algebra.
pub fn decide_reversible(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<ReversibilityVerdict> {
    let n = a.n();
    let commutative = is_commutative(a, tol);
    let ambient = |w: CMatrix, method: VerdictMethod| {
        let mu = product_table(a.basis(), ProductTarget::Reversed);
        let residual = table_residual(a.basis(), &mu, &w);
        ReversibilityVerdict {
            reversible: Reversible::Yes,
            method,
            commutative,
            w: Some(KpSolution {
                op_norm: op_norm(&w),
                element: w,
                residual,
                affine_dim: 0,
                status: KpStatus::Found,
                optimized: true,
                inconsistent: false,
            }),
            envelope_status: None,
            notes: Vec::new(),
        }
    };
    if commutative {
        return Ok(ambient(identity(n), VerdictMethod::Commutative));
    }
    if is_anticommuting(a, tol) {
        return Ok(ambient(-identity(n), VerdictMethod::Anticommuting));
    }
    verdict_from_envelope(a, envelope_kp(a, tol)?, tol)
}

/// The envelope part of [`decide_reversible`], for callers that already hold `envelope_kp(a)`.
pub fn verdict_from_envelope(a: &MatrixAlgebra, ek: EnvelopeKp, tol: &ToleranceConfig) -> Result<ReversibilityVerdict> {
    let commutative = is_commutative(a, tol);
    let mut notes = Vec::new();
    let compressed = !ek.deleted_blocks.is_empty();
    if ek.w.exists() {
        return Ok(ReversibilityVerdict {
            reversible: Reversible::Yes,
            method: if compressed {
                VerdictMethod::CompressedEnvelope
            } else {
                VerdictMethod::Envelope
            },
            commutative,
            w: Some(ek.w),
            envelope_status: Some(ek.status),
            notes,
        });
    }
    if ek.status == EnvelopeStatus::Exact && ek.w.optimized {
        notes.push(if ek.w.inconsistent {
            "no element of the envelope induces the reversed product".into()
        } else {
            format!("every solution has norm at least {:.6}", ek.w.op_norm)
        });
        return Ok(ReversibilityVerdict {
            reversible: Reversible::No,
            method: VerdictMethod::Envelope,
            commutative,
            w: Some(ek.w),
            envelope_status: Some(ek.status),
            notes,
        });
    }
    if !ek.w.optimized {
        notes.push("norm minimization skipped at the size cap".into());
    }
    if compressed {
        let w_tro = generate_tro(a.space(), tol)?;
        let w = kp_solve(a, &w_tro, ProductTarget::Reversed, tol)?;
        if w.exists() {
            return Ok(ReversibilityVerdict {
                reversible: Reversible::Yes,
                method: VerdictMethod::GeneratedTro,
                commutative,
                w: Some(w),
                envelope_status: Some(ek.status),
                notes,
            });
        }
    }
    notes.push("no certificate found and the envelope is not certified".into());
    Ok(ReversibilityVerdict {
        reversible: Reversible::Undecided,
        method: VerdictMethod::Envelope,
        commutative,
        w: Some(ek.w),
        envelope_status: Some(ek.status),
        notes,
    })
}

fn close(a: &CMatrix, b: &CMatrix, eps: f64) -> bool {
    hs_norm(&(a - b)) <= eps * (1.0 + hs_norm(a).max(hs_norm(b)))
}

/// Sufficient certificate: `‖w‖ ≤ 1`, `w ∈ B`, and `x w* y = y x` for basis pairs.
pub fn brskp_certify(a: &MatrixAlgebra, b: &TroSpace, w: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    if w.shape() != b.shape() || a.space().shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: b.shape(),
            got: w.shape(),
        });
    }
    let nw = op_norm(w);
    if nw > 1.0 + tol.eq_tol {
        return Err(Error::OutsideBall(nw));
    }
    if !b.space().contains(w, tol)? {
        return Ok(false);
    }
    let ws = w.adjoint();
    for x in a.basis() {
        let xw = x * &ws;
        for y in a.basis() {
            let p = &xw * y;
            if !close(&p, &(y * x), tol.eq_tol) || !a.space().contains(&p, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Consequences of reversibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Both2Report {
    pub az_commutative: bool,
    pub aw_commutative: bool,
    pub za_commutative: bool,
    pub wa_commutative: bool,
    pub interchange: bool,
    pub z_equals_w: bool,
    pub commutative: bool,
    /// `commutative ⇔ z = w`.
    pub consistent: bool,
    /// `a z* a = a w* a` on basis elements and their pairwise sums.
    pub square_identity: bool,
    pub max_residual: f64,
}

/// Check the identities that `z` and `w` must satisfy for a reversible algebra.
///
/// `eps` is the relative tolerance; pass a looser value when `z`, `w` come from a
/// norm minimization rather than a unique linear solve.
pub fn both2_consequences(basis: &[CMatrix], z: &CMatrix, w: &CMatrix, eps: f64) -> Both2Report {
    let zs = z.adjoint();
    let ws = w.adjoint();
    let mut worst: f64 = 0.0;
    let mut check = |a: &CMatrix, b: &CMatrix| {
        let r = hs_norm(&(a - b)) / (1.0 + hs_norm(a).max(hs_norm(b)));
        worst = worst.max(r);
        r <= eps
    };
    let (mut az, mut aw, mut za, mut wa, mut inter, mut comm) = (true, true, true, true, true, true);
    for x in basis {
        for y in basis {
            az &= check(&(x * &zs * y * &zs), &(y * &zs * x * &zs));
            aw &= check(&(x * &ws * y * &ws), &(y * &ws * x * &ws));
            za &= check(&(&zs * x * &zs * y), &(&zs * y * &zs * x));
            wa &= check(&(&ws * x * &ws * y), &(&ws * y * &ws * x));
            comm &= check(&(x * y), &(y * x));
            for t in basis {
                let zz = x * &zs * y * &zs * t;
                inter &= check(&zz, &(x * &zs * y * &ws * t));
                inter &= check(&zz, &(x * &ws * y * &zs * t));
                inter &= check(&zz, &(x * &ws * y * &ws * t));
            }
        }
    }
    let mut square = true;
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i..] {
            let s = x + y;
            square &= check(&(&s * &zs * &s), &(&s * &ws * &s));
        }
    }
    let z_equals_w = close(z, w, eps);
    Both2Report {
        az_commutative: az,
        aw_commutative: aw,
        za_commutative: za,
        wa_commutative: wa,
        interchange: inter,
        z_equals_w,
        commutative: comm,
        consistent: comm == z_equals_w,
        square_identity: square,
        max_residual: worst,
    }
}

// ---------------------------------------------------------------------------
// Sym(A)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SymEmbedding {
    /// `{x ⊕ xᵀ}` in `M_{2n}`, basis in the order of the input basis.
    pub space: Subspace,
    pub basis: Vec<CMatrix>,
    /// `μ(d_i, d_j) = (b_i b_j) ⊕ (b_i b_j)ᵀ`.
    pub table: Vec<Vec<CMatrix>>,
}

impl SymEmbedding {
    /// Whether `μ` agrees with the product of `M_{2n}` on basis pairs.
    pub fn matches_concrete(&self, tol: &ToleranceConfig) -> bool {
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis
                .iter()
                .enumerate()
                .all(|(j, y)| close(&(x * y), &self.table[i][j], tol.eq_tol))
        })
    }
}

pub fn sym_embed(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<SymEmbedding> {
    let n = a.n();
    let lift = |x: &CMatrix| direct_sum(&[x, &x.transpose()]);
    let basis: Vec<CMatrix> = a.basis().iter().map(lift).collect();
    let table = a
        .basis()
        .iter()
        .map(|x| a.basis().iter().map(|y| lift(&(x * y))).collect())
        .collect();
    let space = orthonormalize(2 * n, 2 * n, &basis, tol)?;
    Ok(SymEmbedding { space, basis, table })
}

/// `z`-solve for `(Sym(A), μ)` inside the envelope of `D`.
pub fn sym_kp(sym: &SymEmbedding, tol: &ToleranceConfig) -> Result<(EnvelopeStatus, KpSolution)> {
    let env = injective_envelope(&sym.space, tol)?;
    let basis: Vec<CMatrix> = sym.basis.iter().map(|b| &env.left * b * &env.right).collect();
    let mu: Vec<Vec<CMatrix>> = sym
        .table
        .iter()
        .map(|row| row.iter().map(|x| &env.left * x * &env.right).collect())
        .collect();
    let kp = kp_solve_table(&basis, &mu, env.envelope.space(), tol)?;
    Ok((env.status, kp))
}

// ---------------------------------------------------------------------------
// Blockwise test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockReport {
    pub shape: (usize, usize),
    pub dim: usize,
    /// `p_k A q_k` is closed under `x·y = x (p_k q_k)* y`.
    pub algebra: bool,
    /// `p_k q_k` induces the corner product on `p_k A q_k`.
    pub candidate_ok: bool,
    pub kp_status: KpStatus,
    pub left_commutative: bool,
    pub right_commutative: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TernaryBlockReport {
    pub blocks: Vec<BlockReport>,
    /// Largest `‖a₁a₂ − Σ_k (p_k a₁ q_k)(p_k a₂ q_k)‖`.
    pub reconstruction_residual: f64,
}

pub fn ternary_block_test(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<TernaryBlockReport> {
    let w = generate_tro(a.space(), tol)?;
    let bs = block_decompose(&w, tol)?;
    let (m, n) = a.space().shape();
    let mut blocks = Vec::new();
    for (k, blk) in bs.blocks.iter().enumerate() {
        let p = &bs.left_projections[k];
        let q = &bs.right_projections[k];
        let zk = p * q;
        let zks = zk.adjoint();
        let corner: Vec<CMatrix> = a.basis().iter().map(|b| p * b * q).collect();
        let ak = orthonormalize(m, n, &corner, tol)?;
        let mut algebra = true;
        let mut candidate_ok = true;
        for (x, bx) in corner.iter().zip(a.basis()) {
            for (y, by) in corner.iter().zip(a.basis()) {
                let prod = x * &zks * y;
                algebra &= ak.contains(&prod, tol)?;
                candidate_ok &= close(&prod, &(p * bx * by * q), tol.eq_tol);
            }
        }
        let mu: Vec<Vec<CMatrix>> = a
            .basis()
            .iter()
            .map(|x| a.basis().iter().map(|y| p * x * y * q).collect())
            .collect();
        let kp = kp_solve_table(&corner, &mu, &bs.block_bases[k], tol)?;
        let comm = |f: &dyn Fn(&CMatrix, &CMatrix) -> CMatrix| {
            ak.basis()
                .iter()
                .all(|x| ak.basis().iter().all(|y| close(&f(x, y), &f(y, x), tol.eq_tol)))
        };
        blocks.push(BlockReport {
            shape: (blk.n, blk.m),
            dim: ak.dim(),
            algebra,
            candidate_ok,
            kp_status: kp.status,
            left_commutative: comm(&|x, y| x * &zks * y * &zks),
            right_commutative: comm(&|x, y| &zks * x * &zks * y),
        });
    }
    let mut recon: f64 = 0.0;
    for x in a.basis() {
        for y in a.basis() {
            let mut sum = CMatrix::zeros(m, n);
            for (p, q) in bs.left_projections.iter().zip(&bs.right_projections) {
                sum += (p * x * q) * (p * y * q);
            }
            recon = recon.max(hs_norm(&(x * y - sum)));
        }
    }
    Ok(TernaryBlockReport {
        blocks,
        reconstruction_residual: recon,
    })
}
