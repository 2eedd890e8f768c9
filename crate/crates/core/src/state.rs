//! Unit-trace bipartite operators. A state here may be non-PSD: the whole
//! point of the toolkit is the gap between the PSD cone and the block-positive
//! cone it sits inside.

use crate::error::{Error, Result};
use crate::herm::{BipartiteDims, HermitianOperator};

/// Trace tolerance applied at construction.
pub const TRACE_TOL: f64 = 1e-8;

/// Hermitian operator with local dimensions (dA, dB) and unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    op: HermitianOperator,
    dims: BipartiteDims,
}

impl BipartiteState {
    pub fn new(op: HermitianOperator, dims: BipartiteDims) -> Result<Self> {
        dims.check(&op)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NonUnitTrace(tr));
        }
        Ok(Self { op, dims })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    /// Depolarize towards the maximally mixed state:
    /// rho_v = v rho + (1-v) I/(dA dB).
    pub fn depolarize(&self, visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::Internal(format!(
                "visibility {visibility} outside [0,1]"
            )));
        }
        let n = self.dims.total();
        let mixed = HermitianOperator::identity(n).scale((1.0 - visibility) / n as f64);
        let op = self.op.scale(visibility).add(&mixed);
        Ok(Self {
            op,
            dims: self.dims,
        })
    }
}
