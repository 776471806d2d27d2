use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is indefinite (eigenvalue {0:.3e})")]
    Indefinite(f64),

    #[error("ambient space must be square, got {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not closed under product: basis pair ({i}, {j}) leaves the span (residual {residual:.3e})")]
    NotAnAlgebra { i: usize, j: usize, residual: f64 },

    #[error("not closed under the ternary product (residual {0:.3e})")]
    NotATro(f64),

    #[error("element is not in the domain subspace (residual {0:.3e})")]
    NotInDomain(f64),

    #[error("algebra is not 3-commutative")]
    NotThreeCommutative,

    #[error("map is not injective on its domain")]
    NotInjective,

    #[error("element lies outside the closed unit ball (norm {0})")]
    OutsideBall(f64),

    #[error("matrix is not an isometry (defect {0:.3e})")]
    NotIsometry(f64),

    #[error("the Choi matrix needs a map defined on all of M_n")]
    DomainNotFull,

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
