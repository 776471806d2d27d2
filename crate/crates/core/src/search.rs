//! Seeded random search over subalgebras of the strictly upper triangular matrices,
//! classified by a predicate signature.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{is_anticommuting, is_commutative, is_nilpotent, is_three_commutative, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::examples::{ex1, random_triangular_algebra};
use crate::io::{matrix_to_json, MatrixJson};
use crate::linalg::ToleranceConfig;
use crate::reversibility::{decide_reversible, Reversible};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub ambient: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_dim: usize,
    /// Add Ex1's algebra as an extra sample (ambient 4 only).
    pub include_ex1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub dim: usize,
    pub commutative: bool,
    pub anticommuting: bool,
    pub three_commutative: bool,
    pub nilpotent: bool,
    pub reversible: Reversible,
}

impl Signature {
    pub fn key(&self) -> String {
        let flag = |b: bool, yes: &str, no: &str| if b { yes.to_string() } else { no.to_string() };
        let rev = match self.reversible {
            Reversible::Yes => "REVERSIBLE",
            Reversible::No => "NOT_REVERSIBLE",
            Reversible::Undecided => "UNDECIDED",
        };
        [
            format!("dim={}", self.dim),
            flag(self.commutative, "COMMUTATIVE", "NONCOMMUTATIVE"),
            flag(self.anticommuting, "ANTICOMMUTING", "NOT_ANTICOMMUTING"),
            flag(self.three_commutative, "3_COMMUTATIVE", "NOT_3_COMMUTATIVE"),
            flag(self.nilpotent, "NILPOTENT", "NOT_NILPOTENT"),
            rev.to_string(),
        ]
        .join("+")
    }

    pub fn is_noncommutative_reversible(&self) -> bool {
        !self.commutative && self.reversible == Reversible::Yes
    }
}

pub fn classify(a: &MatrixAlgebra, tol: &ToleranceConfig) -> Result<Signature> {
    Ok(Signature {
        dim: a.dim(),
        commutative: is_commutative(a, tol),
        anticommuting: is_anticommuting(a, tol),
        three_commutative: is_three_commutative(a, tol),
        nilpotent: is_nilpotent(a, tol)?,
        reversible: decide_reversible(a, tol)?.reversible,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchHit {
    /// Trial index, or `None` for the injected Ex1 sample.
    pub trial: Option<usize>,
    pub trial_seed: Option<u64>,
    pub signature: String,
    pub basis: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSummary {
    pub config: SearchConfig,
    pub histogram: BTreeMap<String, usize>,
    pub samples: usize,
    pub reversible: usize,
    pub reversible_commutative: usize,
    pub noncommutative_reversible: usize,
    pub undecided: usize,
    pub hits: Vec<SearchHit>,
    pub tolerances: ToleranceConfig,
}

/// Per-trial seed: the first word of the ChaCha stream indexed by the trial.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

pub fn run_search(cfg: &SearchConfig, tol: &ToleranceConfig) -> Result<SearchSummary> {
    if !(cfg.ambient == 3 || cfg.ambient == 4) {
        return Err(Error::InvalidInput(format!("ambient must be 3 or 4, got {}", cfg.ambient)));
    }
    if cfg.max_dim == 0 {
        return Err(Error::InvalidInput("max_dim must be positive".into()));
    }
    if cfg.include_ex1 && cfg.ambient != 4 {
        return Err(Error::InvalidInput("Ex1 lives in M_4; use --ambient 4".into()));
    }

    let mut samples: Vec<(Option<usize>, Option<u64>, MatrixAlgebra, Signature)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(cfg.seed, t);
            let a = random_triangular_algebra(cfg.ambient, cfg.max_dim, s, tol)?;
            let sig = classify(&a, tol)?;
            Ok((Some(t), Some(s), a, sig))
        })
        .collect::<Result<_>>()?;
    if cfg.include_ex1 {
        let a = ex1(tol)?;
        let sig = classify(&a, tol)?;
        samples.push((None, None, a, sig));
    }

    let mut histogram = BTreeMap::new();
    let mut hits = Vec::new();
    let (mut rev, mut rev_comm, mut nc_rev, mut undecided) = (0, 0, 0, 0);
    for (trial, seed, a, sig) in &samples {
        *histogram.entry(sig.key()).or_insert(0) += 1;
        match sig.reversible {
            Reversible::Yes => {
                rev += 1;
                if sig.commutative {
                    rev_comm += 1;
                }
            }
            Reversible::Undecided => undecided += 1,
            Reversible::No => {}
        }
        if sig.is_noncommutative_reversible() {
            nc_rev += 1;
            hits.push(SearchHit {
                trial: *trial,
                trial_seed: *seed,
                signature: sig.key(),
                basis: a.basis().iter().map(matrix_to_json).collect(),
            });
        }
    }
    Ok(SearchSummary {
        config: *cfg,
        histogram,
        samples: samples.len(),
        reversible: rev,
        reversible_commutative: rev_comm,
        noncommutative_reversible: nc_rev,
        undecided,
        hits,
        tolerances: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ambient: usize, trials: usize, include_ex1: bool) -> SearchConfig {
        SearchConfig {
            ambient,
            trials,
            seed: 7,
            max_dim: 3,
            include_ex1,
        }
    }

    #[test]
    fn zero_trials_give_empty_histogram() {
        let s = run_search(&cfg(3, 0, false), &ToleranceConfig::default()).unwrap();
        assert!(s.histogram.is_empty() && s.hits.is_empty());
    }

    #[test]
    fn ex1_injection_is_a_hit() {
        let s = run_search(&cfg(4, 0, true), &ToleranceConfig::default()).unwrap();
        assert_eq!(s.hits.len(), 1);
        assert!(s.hits[0].signature.contains("NONCOMMUTATIVE") && s.hits[0].signature.ends_with("+REVERSIBLE"));
    }

    #[test]
    fn deterministic_and_validated() {
        let t = ToleranceConfig::default();
        let a = run_search(&cfg(3, 40, false), &t).unwrap();
        let b = run_search(&cfg(3, 40, false), &t).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.histogram.values().sum::<usize>(), 40);
        assert!(run_search(&cfg(5, 1, false), &t).is_err());
        assert!(run_search(&cfg(3, 1, true), &t).is_err());
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
    }
}
