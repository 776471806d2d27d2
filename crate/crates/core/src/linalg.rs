//! Dense complex linear algebra used throughout the crate.
//!
//! Every "equality" decided here is a residual test: `‖residual‖ ≤ eq_tol·(1 + scale)`.
//! Subspaces are stored with a Hilbert–Schmidt orthonormal basis, where the inner
//! product is `⟨A, B⟩ = trace(B* A)` (linear in `A`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical thresholds shared by every decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eq_tol: f64,
    pub psd_tol: f64,
    pub sdp_tol: f64,
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            psd_tol: 1e-9,
            sdp_tol: 1e-7,
            max_iter: 50_000,
        }
    }
}

impl ToleranceConfig {
    pub fn new(eq_tol: f64, psd_tol: f64, sdp_tol: f64, max_iter: usize) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("psd_tol", psd_tol), ("sdp_tol", sdp_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} must be positive, got {v}")));
            }
        }
        if eq_tol > sdp_tol {
            return Err(Error::InvalidTolerance(format!(
                "eq_tol ({eq_tol}) must not exceed sdp_tol ({sdp_tol})"
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be positive".into()));
        }
        Ok(Self {
            eq_tol,
            psd_tol,
            sdp_tol,
            max_iter,
        })
    }

    /// `true` when a residual counts as zero at the given scale.
    pub fn is_zero(&self, residual: f64, scale: f64) -> bool {
        residual <= self.eq_tol * (1.0 + scale)
    }
}

// ---------------------------------------------------------------------------
// Elementary constructors
// ---------------------------------------------------------------------------

/// Matrix unit `e_ij` (zero-based indices).
pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal direct sum.
pub fn direct_sum(parts: &[&CMatrix]) -> CMatrix {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        out.view_mut((r, c), (p.nrows(), p.ncols())).copy_from(*p);
        r += p.nrows();
        c += p.ncols();
    }
    out
}

/// Assemble a block matrix from a row-major grid of equally shaped blocks.
pub fn block_matrix(blocks: &[Vec<CMatrix>]) -> CMatrix {
    let br = blocks.len();
    let bc = blocks[0].len();
    let (m, n) = blocks[0][0].shape();
    let mut out = CMatrix::zeros(br * m, bc * n);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.view_mut((i * m, j * n), (m, n)).copy_from(b);
        }
    }
    out
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

// ---------------------------------------------------------------------------
// Norms and inner products
// ---------------------------------------------------------------------------

/// Hilbert–Schmidt inner product `trace(B* A)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    b.dotc(a)
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.norm()
}

/// Largest singular value.
pub fn op_norm(x: &CMatrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    singular_values(x).first().copied().unwrap_or(0.0)
}

pub fn hermitian_defect(x: &CMatrix) -> f64 {
    (x - x.adjoint()).norm()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(x: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (x + x.adjoint()).scale(0.5);
    if h.is_empty() {
        return (Vec::new(), CMatrix::zeros(h.nrows(), 0));
    }
    match to_faer(&h).self_adjoint_eigen(faer::Side::Lower) {
        Ok(eig) => {
            let vals = eig.S().column_vector().iter().map(|z| z.re).collect();
            (vals, from_faer(eig.U()))
        }
        Err(_) => {
            let eig = h.clone().symmetric_eigen();
            let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
            let vecs = CMatrix::from_fn(h.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
            (vals, vecs)
        }
    }
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn real_eigvalsh(x: &RMatrix) -> Vec<f64> {
    let h = (x + x.transpose()).scale(0.5);
    if h.is_empty() {
        return Vec::new();
    }
    to_faer(&h)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .unwrap_or_else(|_| {
            let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        })
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues(x: &CMatrix) -> Vec<C64> {
    if x.is_empty() {
        return Vec::new();
    }
    to_faer(x)
        .eigenvalues()
        .unwrap_or_else(|_| x.clone().schur().unpack().1.diagonal().iter().copied().collect())
}

// Dense factorizations go through faer; nalgebra's SVD is kept only as a fallback.

fn to_faer<T: Copy>(m: &DMatrix<T>) -> faer::Mat<T> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer<T: Copy + nalgebra::Scalar>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin singular value decomposition `m = U diag(s) V*`, `s` nonincreasing.
pub struct Svd<T: nalgebra::Scalar> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

macro_rules! thin_svd_impl {
    ($name:ident, $t:ty, $re:expr) => {
        pub fn $name(m: &DMatrix<$t>) -> Svd<$t> {
            let (r, c) = m.shape();
            let k = r.min(c);
            if k == 0 {
                return Svd {
                    u: DMatrix::zeros(r, 0),
                    s: Vec::new(),
                    v: DMatrix::zeros(c, 0),
                };
            }
            match to_faer(m).thin_svd() {
                Ok(svd) => Svd {
                    u: from_faer(svd.U()),
                    s: svd.S().column_vector().iter().map(|z| $re(*z)).collect(),
                    v: from_faer(svd.V()),
                },
                Err(_) => {
                    let svd = m.clone().svd(true, true);
                    let mut idx: Vec<usize> = (0..k).collect();
                    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
                    let u = svd.u.expect("u requested");
                    let vt = svd.v_t.expect("v_t requested");
                    Svd {
                        u: DMatrix::from_fn(r, k, |i, j| u[(i, idx[j])]),
                        s: idx.iter().map(|&i| svd.singular_values[i]).collect(),
                        v: DMatrix::from_fn(c, k, |i, j| nalgebra::ComplexField::conjugate(vt[(idx[j], i)])),
                    }
                }
            }
        }
    };
}

thin_svd_impl!(svd, C64, |z: C64| z.re);
thin_svd_impl!(real_svd, f64, |z: f64| z);

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m)
        .singular_values()
        .unwrap_or_else(|_| svd(m).s)
}

/// Minimum-norm least-squares solution of `m x = b` with relative rank cutoff.
pub fn lstsq(m: &CMatrix, b: &DVector<C64>, rel_tol: f64) -> DVector<C64> {
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(m.ncols());
    for (k, &sk) in d.s.iter().enumerate() {
        if sk > rel_tol * smax && sk > 0.0 {
            let coef = d.u.column(k).dotc(b) / C64::new(sk, 0.0);
            x += d.v.column(k) * coef;
        }
    }
    x
}

pub fn min_eigenvalue(x: &CMatrix) -> f64 {
    eigh(x).0.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(x: &CMatrix) -> f64 {
    eigh(x).0.last().copied().unwrap_or(0.0)
}

/// Positive semidefinite square root. Eigenvalues in `[-psd_tol, 0)` are clipped.
pub fn sqrt_psd(x: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::NotSquare(x.nrows(), x.ncols()));
    }
    let scale = x.norm();
    let defect = hermitian_defect(x);
    if !tol.is_zero(defect, scale) {
        return Err(Error::NotHermitian(defect));
    }
    let (vals, vecs) = eigh(x);
    let floor = tol.psd_tol * (1.0 + scale);
    if let Some(&lo) = vals.first() {
        if lo < -floor {
            return Err(Error::Indefinite(lo));
        }
    }
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// Orthogonal projection onto the span of the columns of `v`.
///
/// Singular values at or below `rel_tol·max(σ_max, 1)` count as zero, here and in the
/// null-space helpers below.
pub fn range_projection(v: &CMatrix, rel_tol: f64) -> CMatrix {
    let basis = range_basis(v, rel_tol);
    &basis * basis.adjoint()
}

/// Orthonormal basis (as columns) of the column space of `v`.
pub fn range_basis(v: &CMatrix, rel_tol: f64) -> CMatrix {
    let n = v.nrows();
    if v.ncols() == 0 || v.norm() == 0.0 {
        return CMatrix::zeros(n, 0);
    }
    let d = svd(v);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let keep = d.s.iter().filter(|&&x| x > rel_tol * smax.max(1.0)).count();
    d.u.columns(0, keep).into_owned()
}

/// Orthonormal basis (columns) of the kernel of `m`, by relative singular-value cutoff.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().filter(|&&x| x > rel_tol * smax.max(1.0)).count();
    d.v.columns(rank, cols - rank).into_owned()
}

/// Real counterpart of [`null_space`].
pub fn real_null_space(m: &RMatrix, rel_tol: f64) -> RMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return RMatrix::zeros(0, 0);
    }
    let padded = if m.nrows() < cols {
        let mut p = RMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = real_svd(&padded);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().filter(|&&x| x > rel_tol * smax.max(1.0)).count();
    d.v.columns(rank, cols - rank).into_owned()
}

/// Minimum-norm least-squares solution of `m x = b` with relative rank cutoff.
pub fn real_lstsq(m: &RMatrix, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let d = real_svd(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(m.ncols());
    for (k, &sk) in d.s.iter().enumerate() {
        if sk > rel_tol * smax && sk > 0.0 {
            x += d.v.column(k) * (d.u.column(k).dot(b) / sk);
        }
    }
    x
}

/// Column-major flattening.
pub fn vec_of(m: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v)
}

// ---------------------------------------------------------------------------
// Subspaces of M_{m,n}
// ---------------------------------------------------------------------------

/// A linear subspace of `M_{rows,cols}` with a Hilbert–Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

/// Span of `mats` inside `M_{rows,cols}` with an orthonormal basis.
///
/// Rank is decided by a singular-value cutoff at `eq_tol` relative to the largest
/// singular value of the stacked (vectorized) input.
pub fn orthonormalize(
    rows: usize,
    cols: usize,
    mats: &[CMatrix],
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    for m in mats {
        if m.shape() != (rows, cols) {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                got: m.shape(),
            });
        }
        if !all_finite(m) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
    }
    let n = rows * cols;
    if mats.is_empty() || n == 0 {
        return Ok(Subspace::zero(rows, cols));
    }
    let mut stacked = CMatrix::zeros(n, mats.len());
    for (k, m) in mats.iter().enumerate() {
        stacked.column_mut(k).copy_from_slice(m.as_slice());
    }
    let q = range_basis(&stacked, tol.eq_tol);
    let basis = (0..q.ncols())
        .map(|k| unvec(q.column(k).as_slice(), rows, cols))
        .collect();
    Ok(Subspace { rows, cols, basis })
}

impl Subspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    /// Span of a non-empty list of equally shaped matrices.
    pub fn span(mats: &[CMatrix], tol: &ToleranceConfig) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::InvalidInput("span of an empty list needs a shape".into()))?;
        orthonormalize(first.nrows(), first.ncols(), mats, tol)
    }

    /// The whole space `M_{rows,cols}` with the matrix-unit basis.
    pub fn full(rows: usize, cols: usize) -> Self {
        let mut basis = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                basis.push(unit(rows, cols, i, j));
            }
        }
        Self { rows, cols, basis }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    fn check_shape(&self, x: &CMatrix) -> Result<()> {
        if x.shape() != (self.rows, self.cols) {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, self.cols),
                got: x.shape(),
            });
        }
        Ok(())
    }

    /// Coordinates `⟨x, b_l⟩` against the orthonormal basis.
    pub fn coords(&self, x: &CMatrix) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| hs_inner(x, b)))
    }

    pub fn from_coords(&self, c: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for (b, &a) in self.basis.iter().zip(c) {
            out += b * a;
        }
        out
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        self.from_coords(self.coords(x).as_slice())
    }

    /// Hilbert–Schmidt distance from `x` to the subspace.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    /// `‖x − Proj(x)‖_HS ≤ eq_tol·max(1, ‖x‖_HS)`.
    pub fn contains(&self, x: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
        self.check_shape(x)?;
        Ok(self.residual(x) <= tol.eq_tol * hs_norm(x).max(1.0))
    }

    /// Span of `self ∪ extra`.
    pub fn extend(&self, extra: &[CMatrix], tol: &ToleranceConfig) -> Result<Self> {
        let mut all = self.basis.clone();
        all.extend(extra.iter().cloned());
        orthonormalize(self.rows, self.cols, &all, tol)
    }

    pub fn is_subspace_of(&self, other: &Subspace, tol: &ToleranceConfig) -> bool {
        self.shape() == other.shape()
            && self
                .basis
                .iter()
                .all(|b| other.contains(b, tol).unwrap_or(false))
    }

    pub fn same_as(&self, other: &Subspace, tol: &ToleranceConfig) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other, tol)
    }

    /// Apply `f` to each basis element and take the span of the results.
    pub fn map_span<F>(&self, rows: usize, cols: usize, f: F, tol: &ToleranceConfig) -> Result<Self>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let imgs: Vec<CMatrix> = self.basis.iter().map(f).collect();
        orthonormalize(rows, cols, &imgs, tol)
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((hs_inner(a, b) - target).norm());
            }
        }
        worst
    }

    /// Orthonormal basis of the HS-orthogonal complement inside `M_{rows,cols}`.
    pub fn complement(&self, tol: &ToleranceConfig) -> Subspace {
        let n = self.rows * self.cols;
        let mut m = CMatrix::zeros(self.dim().max(1), n);
        for (k, b) in self.basis.iter().enumerate() {
            for (idx, v) in b.as_slice().iter().enumerate() {
                m[(k, idx)] = v.conj();
            }
        }
        let ns = null_space(&m, tol.eq_tol);
        let basis = (0..ns.ncols())
            .map(|k| unvec(ns.column(k).as_slice(), self.rows, self.cols))
            .collect();
        Subspace {
            rows: self.rows,
            cols: self.cols,
            basis,
        }
    }

    /// Intersection with another subspace of the same ambient.
    pub fn intersect(&self, other: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.rows, self.cols));
        }
        // Σ a_i s_i = Σ b_j o_j  ⇔  [S | −O] (a, b) = 0
        let n = self.rows * self.cols;
        let k = self.dim() + other.dim();
        let mut m = CMatrix::zeros(n, k);
        for (c, b) in self.basis.iter().enumerate() {
            m.column_mut(c).copy_from_slice(b.as_slice());
        }
        for (c, b) in other.basis.iter().enumerate() {
            m.column_mut(self.dim() + c).copy_from(&(-vec_of(b)));
        }
        let ns = null_space(&m, tol.eq_tol);
        let mats: Vec<CMatrix> = (0..ns.ncols())
            .map(|c| {
                let coeffs: Vec<C64> = (0..self.dim()).map(|i| ns[(i, c)]).collect();
                self.from_coords(&coeffs)
            })
            .collect();
        orthonormalize(self.rows, self.cols, &mats, tol)
    }

    /// Replace the basis by a unitary recombination (same span).
    pub fn recombined(&self, unitary: &CMatrix) -> Subspace {
        let d = self.dim();
        assert_eq!(unitary.shape(), (d, d));
        let basis = (0..d)
            .map(|j| {
                let coeffs: Vec<C64> = (0..d).map(|i| unitary[(i, j)]).collect();
                self.from_coords(&coeffs)
            })
            .collect();
        Subspace {
            rows: self.rows,
            cols: self.cols,
            basis,
        }
    }
}

// ---------------------------------------------------------------------------
// Linear maps defined on a subspace
// ---------------------------------------------------------------------------

/// A linear map from a [`Subspace`] into `M_{out_rows,out_cols}`, fixed by basis images.
#[derive(Debug, Clone)]
pub struct LinearMapOnSubspace {
    domain: Subspace,
    out_rows: usize,
    out_cols: usize,
    images: Vec<CMatrix>,
}

impl LinearMapOnSubspace {
    pub fn new(domain: Subspace, out_rows: usize, out_cols: usize, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != domain.dim() {
            return Err(Error::InvalidInput(format!(
                "{} images for a {}-dimensional domain",
                images.len(),
                domain.dim()
            )));
        }
        for im in &images {
            if im.shape() != (out_rows, out_cols) {
                return Err(Error::ShapeMismatch {
                    expected: (out_rows, out_cols),
                    got: im.shape(),
                });
            }
        }
        Ok(Self {
            domain,
            out_rows,
            out_cols,
            images,
        })
    }

    /// Build from a linear function evaluated on the domain basis.
    pub fn from_fn<F>(domain: &Subspace, out_rows: usize, out_cols: usize, f: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let images = domain.basis().iter().map(f).collect();
        Self::new(domain.clone(), out_rows, out_cols, images)
    }

    pub fn identity(domain: &Subspace) -> Self {
        Self {
            domain: domain.clone(),
            out_rows: domain.rows(),
            out_cols: domain.cols(),
            images: domain.basis().to_vec(),
        }
    }

    pub fn zero(domain: &Subspace, out_rows: usize, out_cols: usize) -> Self {
        Self {
            domain: domain.clone(),
            out_rows,
            out_cols,
            images: vec![CMatrix::zeros(out_rows, out_cols); domain.dim()],
        }
    }

    pub fn transpose_map(domain: &Subspace) -> Self {
        Self {
            domain: domain.clone(),
            out_rows: domain.cols(),
            out_cols: domain.rows(),
            images: domain.basis().iter().map(|b| b.transpose()).collect(),
        }
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn out_shape(&self) -> (usize, usize) {
        (self.out_rows, self.out_cols)
    }

    pub fn apply_coords(&self, c: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.out_rows, self.out_cols);
        for (im, &a) in self.images.iter().zip(c) {
            out += im * a;
        }
        out
    }

    /// Evaluate at `x`, which must lie in the domain.
    pub fn apply(&self, x: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
        if !self.domain.contains(x, tol)? {
            return Err(Error::NotInDomain(self.domain.residual(x)));
        }
        Ok(self.apply_coords(self.domain.coords(x).as_slice()))
    }

    /// Span of the images.
    pub fn image_space(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        orthonormalize(self.out_rows, self.out_cols, &self.images, tol)
    }

    pub fn is_injective(&self, tol: &ToleranceConfig) -> Result<bool> {
        Ok(self.image_space(tol)?.dim() == self.domain.dim())
    }

    /// Inverse map, defined on the image subspace.
    pub fn inverse(&self, tol: &ToleranceConfig) -> Result<Self> {
        let image = self.image_space(tol)?;
        if image.dim() != self.domain.dim() {
            return Err(Error::NotInjective);
        }
        let d = self.domain.dim();
        // coordinates of images against the image basis: G[m, l] = ⟨img_l, t_m⟩
        let g = CMatrix::from_fn(d, d, |m, l| hs_inner(&self.images[l], &image.basis()[m]));
        let ginv = g
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("image Gram matrix is singular".into()))?;
        let inv_images = (0..d)
            .map(|m| {
                let coeffs: Vec<C64> = (0..d).map(|l| ginv[(l, m)]).collect();
                self.domain.from_coords(&coeffs)
            })
            .collect();
        Self::new(image, self.domain.rows(), self.domain.cols(), inv_images)
    }

    /// Composition `other ∘ self` where `other` is given as a plain matrix function.
    pub fn then<F>(&self, out_rows: usize, out_cols: usize, f: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        Self::new(
            self.domain.clone(),
            out_rows,
            out_cols,
            self.images.iter().map(f).collect(),
        )
    }

    /// Restriction to a subspace of the domain.
    pub fn restrict(&self, sub: &Subspace, tol: &ToleranceConfig) -> Result<Self> {
        let images = sub
            .basis()
            .iter()
            .map(|b| self.apply(b, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sub.clone(), self.out_rows, self.out_cols, images)
    }
}

/// Entrywise amplification of `phi` to a `k×k` block matrix `x` with blocks in the domain.
pub fn amplify(phi: &LinearMapOnSubspace, k: usize, x: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    let (m, n) = phi.domain().shape();
    if x.shape() != (k * m, k * n) {
        return Err(Error::ShapeMismatch {
            expected: (k * m, k * n),
            got: x.shape(),
        });
    }
    amplify_rect(phi, k, k, x, tol)
}

/// Amplification to a `k1×k2` block matrix.
pub fn amplify_rect(
    phi: &LinearMapOnSubspace,
    k1: usize,
    k2: usize,
    x: &CMatrix,
    tol: &ToleranceConfig,
) -> Result<CMatrix> {
    let (m, n) = phi.domain().shape();
    let (p, q) = phi.out_shape();
    if x.shape() != (k1 * m, k2 * n) {
        return Err(Error::ShapeMismatch {
            expected: (k1 * m, k2 * n),
            got: x.shape(),
        });
    }
    let mut out = CMatrix::zeros(k1 * p, k2 * q);
    for i in 0..k1 {
        for j in 0..k2 {
            let block = x.view((i * m, j * n), (m, n)).into_owned();
            let img = phi.apply(&block, tol)?;
            out.view_mut((i * p, j * q), (p, q)).copy_from(&img);
        }
    }
    Ok(out)
}

/// `Σ_l C_l ⊗ B_l` for coefficient matrices `C_l` and a family `B_l`.
pub fn kron_sum(coeffs: &[CMatrix], family: &[CMatrix]) -> CMatrix {
    let (k1, k2) = coeffs[0].shape();
    let (m, n) = family[0].shape();
    let mut out = CMatrix::zeros(k1 * m, k2 * n);
    for (c, b) in coeffs.iter().zip(family) {
        out += kron(c, b);
    }
    out
}

/// Gaussian matrix with independent standard complex entries.
pub fn random_gaussian<R: rand::Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary from a seeded QR factorization.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = random_gaussian(n, n, &mut rng);
    let (q, r) = g.qr().unpack();
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}
