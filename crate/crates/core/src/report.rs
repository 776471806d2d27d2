//! The full predicate battery on one algebra, collected into a serializable report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    commutator_subspace, is_anticommuting, is_c_faithful, is_commutative, is_idempotent_algebra,
    is_left_faithful, is_nilpotent, is_right_faithful, is_three_commutative, radical, verify_algebra,
    wedderburn_split, MatrixAlgebra, WedderburnSplit,
};
use crate::cb::{is_symmetric_space, FeasibilityStatus};
use crate::error::{Error, Result};
use crate::io::{matrix_to_json, MatrixJson};
use crate::linalg::{hs_norm, identity, orthonormalize, CMatrix, ToleranceConfig};
use crate::reversibility::{
    both2_consequences, decide_reversible, envelope_kp, verdict_from_envelope, Both2Report, KpStatus, Reversible,
    ReversibilityVerdict, VerdictMethod,
};
use crate::structure::{triangularize, TriangularizeOutcome};
use crate::tro::EnvelopeStatus;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Skip the symmetric-space SDP.
    pub skip_sdp: bool,
    /// Skip the envelope and everything that needs it (z, w, non-trivial reversibility).
    pub skip_envelope: bool,
    pub skip_triangularize: bool,
    /// Recorded in the report; the randomized steps inside the pipeline use fixed seeds.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WedderburnStatus {
    Split,
    RadicalOnly,
    NotThreeCommutative,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WedderburnSummary {
    pub status: WedderburnStatus,
    pub c_dim: Option<usize>,
    pub k_dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Predicates {
    pub commutative: bool,
    pub anticommuting: bool,
    pub three_commutative: bool,
    pub idempotent: bool,
    pub left_faithful: bool,
    pub right_faithful: bool,
    pub c_faithful: bool,
    pub nilpotent: bool,
    pub radical_dim: usize,
    pub commutator_dim: usize,
    pub wedderburn: WedderburnSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KpCertificate {
    pub status: KpStatus,
    pub residual: f64,
    pub op_norm: f64,
    pub affine_dim: usize,
    pub optimized: bool,
    pub inconsistent: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricCertificate {
    pub status: FeasibilityStatus,
    pub upper_bound: Option<f64>,
    pub lower_bound: f64,
    pub residual: f64,
    pub level: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangularCertificate {
    pub success: bool,
    pub residual: Option<f64>,
    pub unitarity_defect: Option<f64>,
    pub failed_stage: Option<usize>,
    pub unitary: Option<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificates {
    pub closure_residual: f64,
    /// `[A,A]·A = A·[A,A] = 0`, reported for 3-commutative algebras.
    pub commutator_annihilates: Option<bool>,
    pub reversibility_method: Option<VerdictMethod>,
    pub reversibility_notes: Vec<String>,
    pub z: Option<KpCertificate>,
    pub w: Option<KpCertificate>,
    pub both2: Option<Both2Report>,
    pub symmetric: Option<SymmetricCertificate>,
    pub triangularization: Option<TriangularCertificate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeSummary {
    pub dims: Vec<(usize, usize)>,
    pub status: EnvelopeStatus,
    pub deleted_blocks: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdicts {
    pub reversible: Reversible,
    pub symmetric: Option<FeasibilityStatus>,
    pub triangularizable: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub ambient: usize,
    pub dim: usize,
    pub predicates: Predicates,
    pub certificates: Certificates,
    pub envelope: Option<EnvelopeSummary>,
    pub z: Option<MatrixJson>,
    pub w: Option<MatrixJson>,
    pub verdicts: Verdicts,
    pub tolerances: ToleranceConfig,
    pub options: AnalysisOptions,
    pub timings_ms: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    /// Every attempted SDP-backed verdict came back undecided.
    pub fn nothing_decidable(&self) -> bool {
        let rev_undecided = self.verdicts.reversible == Reversible::Undecided;
        let sym_undecided = !matches!(
            self.verdicts.symmetric,
            Some(FeasibilityStatus::Feasible) | Some(FeasibilityStatus::Infeasible)
        );
        rev_undecided && sym_undecided && !(self.options.skip_sdp && self.options.skip_envelope)
    }
}

/// Span the input matrices and check closure, reporting the worst pair by input index.
pub fn algebra_from_matrices(n: usize, mats: &[CMatrix], tol: &ToleranceConfig) -> Result<MatrixAlgebra> {
    for m in mats {
        if m.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                got: m.shape(),
            });
        }
    }
    let space = orthonormalize(n, n, mats, tol)?;
    let mut worst = (0, 0, 0.0f64);
    let mut failed = false;
    for (i, x) in mats.iter().enumerate() {
        for (j, y) in mats.iter().enumerate() {
            let p = x * y;
            let r = space.residual(&p);
            if r > worst.2 {
                worst = (i, j, r);
            }
            failed |= !tol.is_zero(r, hs_norm(&p));
        }
    }
    if failed {
        return Err(Error::NotAnAlgebra {
            i: worst.0,
            j: worst.1,
            residual: worst.2,
        });
    }
    verify_algebra(&space, tol)
}

fn kp_cert(s: &crate::reversibility::KpSolution) -> KpCertificate {
    KpCertificate {
        status: s.status,
        residual: s.residual,
        op_norm: s.op_norm,
        affine_dim: s.affine_dim,
        optimized: s.optimized,
        inconsistent: s.inconsistent,
    }
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, key: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(key.to_string(), start.elapsed().as_secs_f64() * 1e3);
    out
}

pub fn analyze(a: &MatrixAlgebra, opts: &AnalysisOptions, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let n = a.n();
    let mut timings = BTreeMap::new();
    let mut warnings = Vec::new();

    let predicates = timed(&mut timings, "predicates", || -> Result<Predicates> {
        let three = is_three_commutative(a, tol);
        let wedderburn = if !three {
            WedderburnSummary {
                status: WedderburnStatus::NotThreeCommutative,
                c_dim: None,
                k_dim: None,
            }
        } else {
            match wedderburn_split(a, tol) {
                Ok(WedderburnSplit::Split { c, k, .. }) => WedderburnSummary {
                    status: WedderburnStatus::Split,
                    c_dim: Some(c.dim()),
                    k_dim: Some(k.dim()),
                },
                Ok(WedderburnSplit::RadicalOnly) => WedderburnSummary {
                    status: WedderburnStatus::RadicalOnly,
                    c_dim: Some(0),
                    k_dim: Some(a.dim()),
                },
                Err(_) => WedderburnSummary {
                    status: WedderburnStatus::Failed,
                    c_dim: None,
                    k_dim: None,
                },
            }
        };
        Ok(Predicates {
            commutative: is_commutative(a, tol),
            anticommuting: is_anticommuting(a, tol),
            three_commutative: three,
            idempotent: is_idempotent_algebra(a, tol)?,
            left_faithful: is_left_faithful(a, tol)?,
            right_faithful: is_right_faithful(a, tol)?,
            c_faithful: is_c_faithful(a, tol)?,
            nilpotent: is_nilpotent(a, tol)?,
            radical_dim: radical(a, tol)?.dim(),
            commutator_dim: commutator_subspace(a, tol)?.dim(),
            wedderburn,
        })
    })?;
    if predicates.wedderburn.status == WedderburnStatus::Failed {
        warnings.push("Wedderburn split failed numerically".into());
    }

    let commutator_annihilates = if predicates.three_commutative {
        let j = commutator_subspace(a, tol)?;
        let ok = j.basis().iter().all(|c| {
            a.basis().iter().all(|x| {
                let s = hs_norm(c) * hs_norm(x);
                tol.is_zero(hs_norm(&(c * x)), s) && tol.is_zero(hs_norm(&(x * c)), s)
            })
        });
        Some(ok)
    } else {
        None
    };

    let mut envelope = None;
    let mut z = None;
    let mut w = None;
    let mut z_cert = None;
    let mut w_cert = None;
    let mut both2 = None;
    let verdict: ReversibilityVerdict = if opts.skip_envelope {
        let v = decide_reversible_fast(a, tol);
        if v.is_none() {
            warnings.push("reversibility needs the envelope, which was skipped".into());
        }
        v.unwrap_or_else(|| ReversibilityVerdict {
            reversible: Reversible::Undecided,
            method: VerdictMethod::Envelope,
            commutative: predicates.commutative,
            w: None,
            envelope_status: None,
            notes: vec!["envelope skipped".into()],
        })
    } else {
        let ek = timed(&mut timings, "envelope", || envelope_kp(a, tol))?;
        envelope = Some(EnvelopeSummary {
            dims: ek.dims.clone(),
            status: ek.status,
            deleted_blocks: ek.deleted_blocks.clone(),
            dim: ek.envelope.dim(),
        });
        z_cert = Some(kp_cert(&ek.z));
        w_cert = Some(kp_cert(&ek.w));
        if ek.z.exists() {
            z = Some(ek.z.element.clone());
        }
        if ek.w.exists() {
            w = Some(ek.w.element.clone());
        }
        if let (Some(zz), Some(ww)) = (&z, &w) {
            let unique = ek.z.status == KpStatus::UniqueInBall && ek.w.status == KpStatus::UniqueInBall;
            let eps = if unique { tol.sdp_tol } else { tol.sdp_tol.sqrt() };
            both2 = Some(both2_consequences(&ek.basis, zz, ww, eps));
        }
        if ek.status == EnvelopeStatus::Candidate {
            warnings.push("envelope is a candidate (block deletion not certified minimal)".into());
        }
        timed(&mut timings, "reversibility", || match decide_reversible_fast(a, tol) {
            Some(v) => Ok(v),
            None => verdict_from_envelope(a, ek, tol),
        })?
    };
    if verdict.reversible == Reversible::Undecided {
        warnings.push("reversibility UNDECIDED".into());
    }

    let symmetric = if opts.skip_sdp {
        None
    } else {
        let out = timed(&mut timings, "symmetric", || is_symmetric_space(a.space(), tol))?;
        if out.status == FeasibilityStatus::Undecided {
            warnings.push("symmetric-space check UNDECIDED".into());
        }
        Some(SymmetricCertificate {
            status: out.status,
            upper_bound: out.upper_bound,
            lower_bound: out.lower_bound,
            residual: out.residual,
            level: out.level,
        })
    };

    let triangularization = if opts.skip_triangularize {
        None
    } else {
        let out = timed(&mut timings, "triangularize", || triangularize(a, tol))?;
        Some(match out {
            TriangularizeOutcome::Success(r) => TriangularCertificate {
                success: true,
                residual: Some(r.residual),
                unitarity_defect: Some(hs_norm(&(r.unitary.adjoint() * &r.unitary - identity(n)))),
                failed_stage: None,
                unitary: Some(matrix_to_json(&r.unitary)),
            },
            TriangularizeOutcome::Fail { stage } => TriangularCertificate {
                success: false,
                residual: None,
                unitarity_defect: None,
                failed_stage: Some(stage),
                unitary: None,
            },
        })
    };

    if w.is_none() {
        if let Some(sol) = verdict.w.as_ref().filter(|s| s.exists()) {
            w = Some(sol.element.clone());
        }
    }

    Ok(AnalysisReport {
        ambient: n,
        dim: a.dim(),
        certificates: Certificates {
            closure_residual: a.closure_residual(),
            commutator_annihilates,
            reversibility_method: Some(verdict.method),
            reversibility_notes: verdict.notes.clone(),
            z: z_cert,
            w: w_cert,
            both2,
            symmetric: symmetric.clone(),
            triangularization: triangularization.clone(),
        },
        predicates,
        envelope,
        z: z.as_ref().map(matrix_to_json),
        w: w.as_ref().map(matrix_to_json),
        verdicts: Verdicts {
            reversible: verdict.reversible,
            symmetric: symmetric.map(|s| s.status),
            triangularizable: triangularization.map(|t| t.success),
        },
        tolerances: *tol,
        options: *opts,
        timings_ms: timings,
        warnings,
    })
}

/// The commutative and anticommuting shortcuts of [`decide_reversible`], without the envelope.
fn decide_reversible_fast(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Option<ReversibilityVerdict> {
    if is_commutative(a, tol) || is_anticommuting(a, tol) {
        decide_reversible(a, tol).ok()
    } else {
        None
    }
}
