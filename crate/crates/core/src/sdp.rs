//! Primal–dual interior-point method for small block-diagonal semidefinite programs.
//!
//! Standard form, real symmetric blocks:
//!
//! ```text
//!   (P)  min ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//!   (D)  max bᵀy      s.t. Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! The search direction is HKM with a Mehrotra predictor–corrector step. Complex
//! Hermitian data is handled by [`ComplexSdp`], which realifies each block as
//! `H ↦ ½ [[Re H, −Im H], [Im H, Re H]]` so that `⟨A, X⟩ = Re tr(A X)` carries over.
//!
//! Callers never trust solver output directly: every decision made from a solution is
//! re-verified with exact eigenvalue checks on repaired certificates.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::linalg::{real_eigvalsh, CMatrix, RMatrix, C64};

pub type Blocks = Vec<RMatrix>;

/// Symmetric sparse matrix in full (both triangles) coordinate storage.
#[derive(Debug, Clone, Default)]
pub struct SparseSym {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `v` at `(r, c)` and, off the diagonal, at `(c, r)`.
    pub fn add(&mut self, block: usize, r: usize, c: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        self.entries.push((block, r, c, v));
        if r != c {
            self.entries.push((block, c, r, v));
        }
    }

    fn add_directed(&mut self, block: usize, r: usize, c: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((block, r, c, v));
        }
    }

    /// Sort and merge duplicate coordinates.
    pub fn finalize(mut self) -> Self {
        self.entries
            .sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut merged: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for e in self.entries {
            match merged.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (e.0, e.1, e.2) => last.3 += e.3,
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.3 != 0.0);
        Self { entries: merged }
    }

    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self, sizes: &[usize]) -> Blocks {
        let mut out: Blocks = sizes.iter().map(|&n| RMatrix::zeros(n, n)).collect();
        for &(b, r, c, v) in &self.entries {
            out[b][(r, c)] += v;
        }
        out
    }

    pub fn inner(&self, x: &Blocks) -> f64 {
        self.entries.iter().map(|&(b, r, c, v)| v * x[b][(r, c)]).sum()
    }

    fn frob_by_block(&self, nblocks: usize) -> Vec<f64> {
        let mut out = vec![0.0; nblocks];
        for &(b, _, _, v) in &self.entries {
            out[b] += v * v;
        }
        out.iter().map(|s| s.sqrt()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub c: SparseSym,
    pub a: Vec<SparseSym>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Blocks,
    pub y: Vec<f64>,
    pub z: Blocks,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub iterations: usize,
    pub converged: bool,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub rel_gap: f64,
}

fn blocks_inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn blocks_norm(a: &Blocks) -> f64 {
    blocks_inner(a, a).sqrt()
}

fn sym(m: RMatrix) -> RMatrix {
    (&m + m.transpose()) * 0.5
}

fn apply_a(a: &[SparseSym], x: &Blocks) -> DVector<f64> {
    DVector::from_iterator(a.len(), a.iter().map(|ai| ai.inner(x)))
}

fn apply_at(a: &[SparseSym], y: &[f64], sizes: &[usize]) -> Blocks {
    let mut out: Blocks = sizes.iter().map(|&n| RMatrix::zeros(n, n)).collect();
    for (ai, &yi) in a.iter().zip(y) {
        if yi == 0.0 {
            continue;
        }
        for &(b, r, c, v) in ai.entries() {
            out[b][(r, c)] += yi * v;
        }
    }
    out
}

fn spd_inverse(m: &RMatrix) -> Option<RMatrix> {
    let chol = m.clone().cholesky()?;
    Some(chol.inverse())
}

/// Largest `α` with `x + α·dx ⪰ 0`, or `∞`.
fn max_step(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, dxb) in x.iter().zip(dx) {
        if xb.nrows() == 0 {
            continue;
        }
        let lmin = match xb.clone().cholesky() {
            Some(ch) => {
                let l = ch.l();
                let Some(t) = l.solve_lower_triangular(dxb) else {
                    return 0.0;
                };
                let Some(s) = l.solve_lower_triangular(&t.transpose()) else {
                    return 0.0;
                };
                let s = sym(s);
                real_eigvalsh(&s).first().copied().unwrap_or(0.0)
            }
            None => return 0.0,
        };
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

struct Schur<'a> {
    sizes: &'a [usize],
    m: usize,
    /// `(constraint, row, col, value)` grouped by block.
    by_block: Vec<Vec<(usize, usize, usize, f64)>>,
    /// For each constraint: per touched block, its entries.
    per_constraint: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>,
}

impl<'a> Schur<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let nb = p.block_sizes.len();
        let mut by_block = vec![Vec::new(); nb];
        let mut per_constraint = Vec::with_capacity(p.a.len());
        for (i, ai) in p.a.iter().enumerate() {
            let mut groups: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
            for &(b, r, c, v) in ai.entries() {
                by_block[b].push((i, r, c, v));
                match groups.last_mut() {
                    Some(g) if g.0 == b => g.1.push((r, c, v)),
                    _ => groups.push((b, vec![(r, c, v)])),
                }
            }
            per_constraint.push(groups);
        }
        Self {
            sizes: &p.block_sizes,
            m: p.a.len(),
            by_block,
            per_constraint,
        }
    }

    /// `M_ij = ⟨A_i, X A_j Z⁻¹⟩`.
    fn assemble(&self, x: &Blocks, zinv: &Blocks) -> RMatrix {
        let m = self.m;
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut col = vec![0.0; m];
                for (b, entries) in &self.per_constraint[j] {
                    let n = self.sizes[*b];
                    let mut ks: Vec<usize> = entries.iter().map(|e| e.1).collect();
                    ks.sort_unstable();
                    ks.dedup();
                    // T = X A_j restricted to the touched columns
                    let mut t = RMatrix::zeros(n, ks.len());
                    for &(r, c, v) in entries {
                        let k = ks.binary_search(&c).expect("column present");
                        let xr = x[*b].column(r);
                        let mut tc = t.column_mut(k);
                        tc.axpy(v, &xr, 1.0);
                    }
                    let zrows = RMatrix::from_fn(ks.len(), n, |k, c| zinv[*b][(ks[k], c)]);
                    let w = t * zrows;
                    for &(i, r, c, v) in &self.by_block[*b] {
                        col[i] += v * w[(c, r)];
                    }
                }
                col
            })
            .collect();
        let mut out = RMatrix::zeros(m, m);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        sym(out)
    }
}

enum Factor {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factor {
    fn new(mut m: RMatrix) -> Option<Self> {
        let n = m.nrows();
        if let Some(ch) = m.clone().cholesky() {
            return Some(Factor::Chol(ch));
        }
        let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut reg = 1e-14 * scale;
        for _ in 0..6 {
            let mut r = m.clone();
            for i in 0..n {
                r[(i, i)] += reg;
            }
            if let Some(ch) = r.cholesky() {
                return Some(Factor::Chol(ch));
            }
            reg *= 100.0;
        }
        for i in 0..n {
            m[(i, i)] += 1e-12 * scale;
        }
        Some(Factor::Lu(m.lu()))
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let out = match self {
            Factor::Chol(c) => c.solve(rhs),
            Factor::Lu(l) => l.solve(rhs)?,
        };
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

/// Solve the standard-form pair with an infeasible-start predictor–corrector method.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    let sizes = &p.block_sizes;
    let nb = sizes.len();
    let m = p.a.len();
    let ntot: usize = sizes.iter().sum::<usize>().max(1);
    let b = DVector::from_column_slice(&p.b);
    let cdense = p.c.to_dense(sizes);
    let bnorm = b.norm();
    let cnorm = blocks_norm(&cdense);

    let a_norms: Vec<Vec<f64>> = p.a.iter().map(|ai| ai.frob_by_block(nb)).collect();
    let c_norms = p.c.frob_by_block(nb);
    let mut x: Blocks = Vec::with_capacity(nb);
    let mut z: Blocks = Vec::with_capacity(nb);
    for (k, &n) in sizes.iter().enumerate() {
        let nf = n as f64;
        let mut xi: f64 = 10f64.max(nf.sqrt());
        let mut eta: f64 = 10f64.max(nf.sqrt()).max(c_norms[k]);
        for (i, an) in a_norms.iter().enumerate() {
            xi = xi.max(nf * (1.0 + p.b[i].abs()) / (1.0 + an[k]));
            eta = eta.max(an[k]);
        }
        x.push(RMatrix::identity(n, n) * xi);
        z.push(RMatrix::identity(n, n) * (1.0 + eta));
    }
    let mut y = vec![0.0; m];
    let schur = Schur::new(p);

    let mut sol = SdpSolution {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        primal_obj: f64::NAN,
        dual_obj: f64::NAN,
        iterations: 0,
        converged: false,
        primal_infeas: f64::INFINITY,
        dual_infeas: f64::INFINITY,
        rel_gap: f64::INFINITY,
    };
    let mut stalls = 0;

    for iter in 0..opts.max_iter {
        let Some(zinv) = z.iter().map(spd_inverse).collect::<Option<Blocks>>() else {
            break;
        };
        let aty = apply_at(&p.a, &y, sizes);
        let rd: Blocks = (0..nb).map(|k| &cdense[k] - &z[k] - &aty[k]).collect();
        let rp = &b - apply_a(&p.a, &x);
        let pobj = blocks_inner(&cdense, &x);
        let dobj = b.dot(&DVector::from_column_slice(&y));
        let gap = blocks_inner(&x, &z);
        let mu = gap / ntot as f64;
        let rel_gap = gap.abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + bnorm);
        let dinf = blocks_norm(&rd) / (1.0 + cnorm);

        sol = SdpSolution {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            primal_obj: pobj,
            dual_obj: dobj,
            iterations: iter,
            converged: false,
            primal_infeas: pinf,
            dual_infeas: dinf,
            rel_gap,
        };
        if rel_gap < opts.tol && pinf < opts.tol && dinf < opts.tol {
            sol.converged = true;
            return sol;
        }
        if !(mu.is_finite()) || stalls > 5 {
            break;
        }

        let Some(factor) = Factor::new(schur.assemble(&x, &zinv)) else {
            break;
        };
        let xrz: Blocks = (0..nb).map(|k| sym(&x[k] * &rd[k] * &zinv[k])).collect();

        let direction = |sigma_mu: f64, corr: Option<&Blocks>| -> Option<(Blocks, Vec<f64>, Blocks)> {
            let h: Blocks = (0..nb)
                .map(|k| {
                    let mut h = &zinv[k] * sigma_mu - &x[k] - &xrz[k];
                    if let Some(c) = corr {
                        h -= &c[k];
                    }
                    h
                })
                .collect();
            let rhs = &rp - apply_a(&p.a, &h);
            let dy = factor.solve(&rhs)?;
            let dy: Vec<f64> = dy.iter().cloned().collect();
            let atdy = apply_at(&p.a, &dy, sizes);
            let dz: Blocks = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
            let dx: Blocks = (0..nb)
                .map(|k| {
                    let mut d = &zinv[k] * sigma_mu - &x[k] - sym(&x[k] * &dz[k] * &zinv[k]);
                    if let Some(c) = corr {
                        d -= &c[k];
                    }
                    sym(d)
                })
                .collect();
            Some((dx, dy, dz))
        };

        let Some((dxa, _, dza)) = direction(0.0, None) else {
            break;
        };
        let ap = max_step(&x, &dxa).min(1.0);
        let ad = max_step(&z, &dza).min(1.0);
        let xa: Blocks = (0..nb).map(|k| &x[k] + &dxa[k] * ap).collect();
        let za: Blocks = (0..nb).map(|k| &z[k] + &dza[k] * ad).collect();
        let mu_aff = blocks_inner(&xa, &za) / ntot as f64;
        let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
        let sigma = if mu > 0.0 {
            (mu_aff / mu).max(0.0).powf(expon).min(1.0)
        } else {
            0.0
        };
        let corr: Blocks = (0..nb).map(|k| sym(&dxa[k] * &dza[k] * &zinv[k])).collect();
        let Some((dx, dy, dz)) = direction(sigma * mu, Some(&corr)) else {
            break;
        };
        let ap_raw = max_step(&x, &dx);
        let ad_raw = max_step(&z, &dz);
        let gamma = 0.9 + 0.09 * ap_raw.min(ad_raw).min(1.0);
        let ap = (gamma * ap_raw).min(1.0);
        let ad = (gamma * ad_raw).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
        }
        for k in 0..nb {
            x[k] = sym(&x[k] + &dx[k] * ap);
            z[k] = sym(&z[k] + &dz[k] * ad);
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }
    sol
}

// ---------------------------------------------------------------------------
// Complex Hermitian front end
// ---------------------------------------------------------------------------

/// Hermitian sparse matrix built from directed entries and their conjugate mirror.
#[derive(Debug, Clone, Default)]
pub struct HermSparse {
    entries: Vec<(usize, usize, usize, C64)>,
}

impl HermSparse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `v` at `(i, j)` and `conj(v)` at `(j, i)`; on the diagonal only `Re v` is added.
    pub fn add(&mut self, block: usize, i: usize, j: usize, v: C64) {
        if v.re != 0.0 || v.im != 0.0 {
            self.entries.push((block, i, j, v));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self, sizes: &[usize]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = sizes.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        for &(b, i, j, v) in &self.entries {
            if i == j {
                out[b][(i, i)] += C64::new(v.re, 0.0);
            } else {
                out[b][(i, j)] += v;
                out[b][(j, i)] += v.conj();
            }
        }
        out
    }

    /// `½ [[Re H, −Im H], [Im H, Re H]]` per block.
    fn realify(&self, sizes: &[usize]) -> SparseSym {
        let mut s = SparseSym::new();
        let mut put = |b: usize, i: usize, j: usize, h: C64| {
            let n = sizes[b];
            s.add_directed(b, i, j, 0.5 * h.re);
            s.add_directed(b, i, n + j, -0.5 * h.im);
            s.add_directed(b, n + i, j, 0.5 * h.im);
            s.add_directed(b, n + i, n + j, 0.5 * h.re);
        };
        for &(b, i, j, v) in &self.entries {
            if i == j {
                put(b, i, i, C64::new(v.re, 0.0));
            } else {
                put(b, i, j, v);
                put(b, j, i, v.conj());
            }
        }
        s.finalize()
    }
}

/// Complex Hermitian standard-form problem; `⟨A, X⟩ = Re tr(A X)`.
#[derive(Debug, Clone)]
pub struct ComplexSdp {
    pub block_sizes: Vec<usize>,
    pub c: HermSparse,
    pub a: Vec<HermSparse>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ComplexSdpSolution {
    pub x: Vec<CMatrix>,
    pub y: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ComplexSdp {
    pub fn new(block_sizes: Vec<usize>) -> Self {
        Self {
            block_sizes,
            c: HermSparse::new(),
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, a: HermSparse, b: f64) {
        self.a.push(a);
        self.b.push(b);
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    /// `C − Σ y_i A_i`, evaluated in complex arithmetic.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out = self.c.to_dense(&self.block_sizes);
        for (ai, &yi) in self.a.iter().zip(y) {
            for (o, d) in out.iter_mut().zip(ai.to_dense(&self.block_sizes)) {
                *o -= d * C64::new(yi, 0.0);
            }
        }
        out
    }

    pub fn solve(&self, opts: &SdpOptions) -> ComplexSdpSolution {
        let sizes: Vec<usize> = self.block_sizes.iter().map(|n| 2 * n).collect();
        let problem = SdpProblem {
            block_sizes: sizes,
            c: self.c.realify(&self.block_sizes),
            a: self.a.iter().map(|a| a.realify(&self.block_sizes)).collect(),
            b: self.b.clone(),
        };
        let sol = solve(&problem, opts);
        let x = sol
            .x
            .iter()
            .zip(&self.block_sizes)
            .map(|(xr, &n)| {
                DMatrix::from_fn(n, n, |i, j| {
                    C64::new(
                        0.5 * (xr[(i, j)] + xr[(n + i, n + j)]),
                        0.5 * (xr[(n + i, j)] - xr[(i, n + j)]),
                    )
                })
            })
            .collect();
        ComplexSdpSolution {
            x,
            y: sol.y,
            primal_obj: sol.primal_obj,
            dual_obj: sol.dual_obj,
            iterations: sol.iterations,
            converged: sol.converged,
        }
    }
}
