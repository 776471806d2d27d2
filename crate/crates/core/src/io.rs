//! JSON format for matrix families: `{"ambient": n, "matrices": [M_1, …, M_k]}` where each
//! `M` is `n` rows of `n` entries and every entry is a `[re, im]` pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// A matrix as nested rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub ambient: usize,
    pub matrices: Vec<MatrixJson>,
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parse one matrix, checking that it is `rows × cols` with finite entries.
pub fn matrix_from_json(m: &MatrixJson, rows: usize, cols: usize) -> Result<CMatrix> {
    if m.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rows, found {}", m.len())));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "row {i}: expected {cols} entries, found {}",
                row.len()
            )));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("entry ({i}, {j}) is not finite")));
            }
            out[(i, j)] = C64::new(*re, *im);
        }
    }
    Ok(out)
}

impl AlgebraFile {
    pub fn new(ambient: usize, mats: &[CMatrix]) -> Self {
        Self {
            ambient,
            matrices: mats.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_matrices(&self) -> Result<Vec<CMatrix>> {
        if self.ambient == 0 {
            return Err(Error::Parse("ambient dimension must be positive".into()));
        }
        self.matrices
            .iter()
            .enumerate()
            .map(|(k, m)| {
                matrix_from_json(m, self.ambient, self.ambient)
                    .map_err(|e| Error::Parse(format!("matrix {k}: {e}")))
            })
            .collect()
    }
}

/// Parse the input format into `(n, matrices)`.
pub fn parse_algebra(text: &str) -> Result<(usize, Vec<CMatrix>)> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mats = file.to_matrices()?;
    Ok((file.ambient, mats))
}

pub fn write_algebra(n: usize, mats: &[CMatrix]) -> String {
    serde_json::to_string_pretty(&AlgebraFile::new(n, mats)).expect("matrix JSON is always serializable")
}
