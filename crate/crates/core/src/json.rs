//! Serializable wire formats. Matrices are encoded either as
//! `{"dim": n, "re": [[..]], "im": [[..]]}` or as
//! `{"entries": [[[re, im], ..], ..]}`; both are accepted on input, the first
//! is emitted. Bipartite files carry an extra `"dims": [dA, dB]`. Floats
//! survive a round trip bit-for-bit (shortest-round-trip decimal formatting).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::di::Povm;
use crate::error::{Error, Result};
use crate::herm::{BipartiteDims, C64, HermitianOperator};
use crate::schmidt::SchmidtTerm;
use crate::state::BipartiteState;
use crate::witness::Witness;

/// Matrix file. Exactly one of the two encodings must be present on input.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct MatrixDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl MatrixDto {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let n = op.dim();
        let mat = op.matrix();
        Self {
            dim: Some(n),
            re: Some(
                (0..n)
                    .map(|i| (0..n).map(|j| mat[(i, j)].re).collect())
                    .collect(),
            ),
            im: Some(
                (0..n)
                    .map(|i| (0..n).map(|j| mat[(i, j)].im).collect())
                    .collect(),
            ),
            entries: None,
            dims: None,
        }
    }

    pub fn from_state(state: &BipartiteState) -> Self {
        let mut dto = Self::from_operator(state.op());
        dto.dims = Some([state.dims().d_a, state.dims().d_b]);
        dto
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        let mat = match (&self.entries, &self.re) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(
                    "matrix carries both \"entries\" and \"re\"/\"im\" encodings".into(),
                ));
            }
            (Some(entries), None) => {
                let n = entries.len();
                for (i, row) in entries.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::Parse(format!(
                            "\"entries\" row {i} has length {} in a {n}-row matrix",
                            row.len()
                        )));
                    }
                }
                DMatrix::from_fn(n, n, |i, j| {
                    C64::new(entries[i][j][0], entries[i][j][1])
                })
            }
            (None, Some(re)) => {
                let n = re.len();
                for (i, row) in re.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::Parse(format!(
                            "\"re\" row {i} has length {} in a {n}-row matrix",
                            row.len()
                        )));
                    }
                }
                if let Some(im) = &self.im {
                    if im.len() != n || im.iter().any(|r| r.len() != n) {
                        return Err(Error::Parse(
                            "\"im\" shape does not match \"re\"".into(),
                        ));
                    }
                }
                DMatrix::from_fn(n, n, |i, j| {
                    let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                    C64::new(re[i][j], im)
                })
            }
            (None, None) => {
                return Err(Error::Parse(
                    "matrix needs either \"entries\" or \"re\" (with optional \"im\")".into(),
                ));
            }
        };
        if let Some(d) = self.dim {
            if d != mat.nrows() {
                return Err(Error::Parse(format!(
                    "\"dim\" is {d} but the matrix has {} rows",
                    mat.nrows()
                )));
            }
        }
        HermitianOperator::new(mat)
    }

    pub fn to_state(&self) -> Result<BipartiteState> {
        let op = self.to_operator()?;
        let [d_a, d_b] = self.dims.ok_or_else(|| {
            Error::Parse("bipartite state file is missing \"dims\": [dA, dB]".into())
        })?;
        BipartiteState::new(op, BipartiteDims::new(d_a, d_b)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchmidtTermDto {
    pub coeff: f64,
    pub op_a: MatrixDto,
    pub op_b: MatrixDto,
}

/// Witness file: {x, alpha, terms[], target_value, margin}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDto {
    pub x: MatrixDto,
    pub alpha: f64,
    pub terms: Vec<SchmidtTermDto>,
    pub target_value: f64,
    pub margin: f64,
}

impl WitnessDto {
    pub fn from_witness(w: &Witness) -> Self {
        Self {
            x: {
                let mut dto = MatrixDto::from_operator(&w.x);
                dto.dims = Some([w.dims.d_a, w.dims.d_b]);
                dto
            },
            alpha: w.alpha,
            terms: w
                .terms
                .iter()
                .map(|t| SchmidtTermDto {
                    coeff: t.coeff,
                    op_a: MatrixDto::from_operator(&t.op_a),
                    op_b: MatrixDto::from_operator(&t.op_b),
                })
                .collect(),
            target_value: w.target_value,
            margin: w.target_value - w.alpha,
        }
    }

    pub fn to_witness(&self) -> Result<Witness> {
        let x = self.x.to_operator()?;
        let [d_a, d_b] = self
            .dims()
            .ok_or_else(|| Error::Parse("witness \"x\" is missing \"dims\"".into()))?;
        let dims = BipartiteDims::new(d_a, d_b)?;
        dims.check(&x)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(SchmidtTerm {
                    coeff: t.coeff,
                    op_a: t.op_a.to_operator()?,
                    op_b: t.op_b.to_operator()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Witness {
            x,
            alpha: self.alpha,
            terms,
            target_value: self.target_value,
            dims,
        })
    }

    fn dims(&self) -> Option<[usize; 2]> {
        self.x.dims
    }
}

/// A file holding one or more POVMs on the same local space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmListDto {
    pub dim: usize,
    /// Each inner list is one POVM's effects.
    pub povms: Vec<Vec<MatrixDto>>,
}

impl PovmListDto {
    pub fn from_povms(povms: &[Povm]) -> Self {
        Self {
            dim: povms.first().map_or(0, Povm::dim),
            povms: povms
                .iter()
                .map(|p| p.effects().iter().map(MatrixDto::from_operator).collect())
                .collect(),
        }
    }

    pub fn to_povms(&self, tol: f64) -> Result<Vec<Povm>> {
        self.povms
            .iter()
            .map(|effects| {
                let ops = effects
                    .iter()
                    .map(MatrixDto::to_operator)
                    .collect::<Result<Vec<_>>>()?;
                for e in &ops {
                    if e.dim() != self.dim {
                        return Err(Error::Parse(format!(
                            "effect dimension {} does not match file \"dim\" {}",
                            e.dim(),
                            self.dim
                        )));
                    }
                }
                Povm::new(ops, tol)
            })
            .collect()
    }
}
