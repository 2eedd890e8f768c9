//! Dense complex-Hermitian linear algebra shared by every detection module:
//! tensor products, partial trace/transpose, eigendecomposition, norms.
//!
//! Operators are small (local dimensions of a few, total dimension well under
//! a hundred), so everything is dense and allocation cost is irrelevant.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default absolute tolerance for numerical comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative asymmetry above which a matrix is rejected as non-Hermitian
/// instead of silently symmetrized. Distinguishes typos in input files from
/// round-off.
pub const HERMITICITY_REL_TOL: f64 = 1e-8;

/// A finite-dimensional Hermitian matrix with complex entries.
///
/// Construction symmetrizes `X <- (X + X^dag)/2` and fails if the asymmetry
/// `||X - X^dag||` exceeds [`HERMITICITY_REL_TOL`] relative to `||X||`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::ZeroDim);
        }
        let norm = mat.norm();
        let asym = (&mat - mat.adjoint()).norm();
        if norm > 0.0 && asym > HERMITICITY_REL_TOL * norm {
            return Err(Error::NotHermitian {
                asymmetry: asym / norm,
                limit: HERMITICITY_REL_TOL,
            });
        }
        Ok(Self::symmetrize(mat))
    }

    /// Symmetrize without the asymmetry gate. For results that are Hermitian
    /// by construction up to round-off.
    pub(crate) fn symmetrize(mat: DMatrix<C64>) -> Self {
        let sym = (&mat + mat.adjoint()).scale(0.5);
        Self { mat: sym }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        let mat = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Hilbert-Schmidt norm ||X||_2 = sqrt(Tr X^2).
    pub fn hs_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Hilbert-Schmidt inner product Tr(XY); real for Hermitian arguments.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        // Tr(XY) = sum_ij X_ij Y_ji = sum_ij X_ij conj(Y_ij)
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(x, y)| (x * y.conj()).re)
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    /// Eigendecomposition with deterministic ordering: eigenvalues descending,
    /// each eigenvector's phase fixed so its first significant component is
    /// real positive.
    pub fn eig(&self) -> EigDecomposition {
        let n = self.dim();
        let se = self.mat.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            se.eigenvalues[b]
                .partial_cmp(&se.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut values = Vec::with_capacity(n);
        let mut vectors = DMatrix::<C64>::zeros(n, n);
        for (k, &idx) in order.iter().enumerate() {
            values.push(se.eigenvalues[idx]);
            let mut col = se.eigenvectors.column(idx).clone_owned();
            if let Some(lead) = col.iter().find(|c| c.norm() > 1e-8) {
                let phase = lead.unscale(lead.norm());
                col = col.map(|c| c * phase.conj());
            }
            vectors.set_column(k, &col);
        }
        EigDecomposition { values, vectors }
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig().values[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eig().values.last().expect("dim >= 1")
    }

    /// Max-norm distance to another operator, used in tests and deviation
    /// reports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues in descending order with the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigDecomposition {
    /// Rebuild `sum_i lambda_i v_i v_i^dag`; the reconstruction error bounds
    /// the decomposition error.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let diag = DMatrix::from_diagonal(
            &nalgebra::DVector::from_iterator(
                self.values.len(),
                self.values.iter().map(|&v| C64::new(v, 0.0)),
            ),
        );
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Local dimensions (dA, dB) of a bipartite operator on H_A (x) H_B.
/// Composite indices are row-major with A as the major factor:
/// `(a, b) -> a * dB + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartiteDims {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::ZeroDim);
        }
        Ok(Self { d_a, d_b })
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn check(&self, op: &HermitianOperator) -> Result<()> {
        if op.dim() != self.total() {
            return Err(Error::BadLocalDims {
                d_a: self.d_a,
                d_b: self.d_b,
                dim: op.dim(),
            });
        }
        Ok(())
    }
}

/// Which subsystem to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Kronecker product X (x) Y.
pub fn tensor(x: &HermitianOperator, y: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        mat: x.mat.kronecker(&y.mat),
    }
}

/// Partial trace keeping the requested subsystem. Preserves the total trace.
pub fn partial_trace(
    x: &HermitianOperator,
    dims: BipartiteDims,
    keep: Side,
) -> Result<HermitianOperator> {
    dims.check(x)?;
    let (da, db) = (dims.d_a, dims.d_b);
    let mat = match keep {
        Side::A => DMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|b| x.mat[(i * db + b, j * db + b)]).sum()
        }),
        Side::B => DMatrix::from_fn(db, db, |a, b| {
            (0..da).map(|i| x.mat[(i * db + a, i * db + b)]).sum()
        }),
    };
    Ok(HermitianOperator::symmetrize(mat))
}

/// Partial transposition on the B factor: each dB x dB block is transposed.
/// An involution that preserves trace and Hilbert-Schmidt norm.
pub fn partial_transpose(x: &HermitianOperator, dims: BipartiteDims) -> Result<HermitianOperator> {
    dims.check(x)?;
    let (da, db) = (dims.d_a, dims.d_b);
    let mut out = DMatrix::<C64>::zeros(x.dim(), x.dim());
    for i in 0..da {
        for j in 0..da {
            for a in 0..db {
                for b in 0..db {
                    out[(i * db + a, j * db + b)] = x.mat[(i * db + b, j * db + a)];
                }
            }
        }
    }
    Ok(HermitianOperator::symmetrize(out))
}

/// Maximally entangled state Phi_d = (1/d) sum_ij e_ij (x) e_ij on C^d (x) C^d.
pub fn max_entangled(d: usize) -> HermitianOperator {
    let n = d * d;
    let mut mat = DMatrix::<C64>::zeros(n, n);
    let w = C64::new(1.0 / d as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            mat[(i * d + i, j * d + j)] = w;
        }
    }
    HermitianOperator { mat }
}

pub mod pauli {
    //! The 2x2 spin observables and identity.

    use super::{C64, DMatrix, HermitianOperator};

    pub fn sigma_x() -> HermitianOperator {
        from_entries([
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_y() -> HermitianOperator {
        from_entries([
            [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_z() -> HermitianOperator {
        from_entries([
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        ])
    }

    pub fn identity() -> HermitianOperator {
        HermitianOperator::identity(2)
    }

    /// All three in x, y, z order.
    pub fn all() -> [HermitianOperator; 3] {
        [sigma_x(), sigma_y(), sigma_z()]
    }

    fn from_entries(rows: [[C64; 2]; 2]) -> HermitianOperator {
        let mat = DMatrix::from_fn(2, 2, |i, j| rows[i][j]);
        HermitianOperator::new(mat).expect("Pauli matrices are Hermitian")
    }
}
