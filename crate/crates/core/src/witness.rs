//! Device-dependent detection of a given beyond-quantum state: a separating
//! element x with threshold alpha, decomposed into local-observable product
//! terms so both parties only ever measure standard quantum observables.
//!
//! The default separator is x = rho_0 itself with alpha = lambda_max(rho_0),
//! the exact supremum of Tr(x rho_1) over quantum states. For non-PSD rho_0
//! of unit Hilbert-Schmidt norm this is strictly below Tr(rho_0^2). States
//! with smaller norm can violate that ordering; then the negative eigenpart
//! of rho_0 separates instead, with alpha = 0.

use crate::error::{Error, Result};
use crate::herm::{BipartiteDims, C64, DEFAULT_TOL, HermitianOperator};
use crate::random;
use crate::schmidt::{SchmidtTerm, operator_schmidt, reconstruct};
use crate::state::BipartiteState;
use nalgebra::DMatrix;
use rand::Rng;

/// Margin below which a witness is considered degenerate (still returned;
/// callers may warn).
pub const DEGENERATE_MARGIN: f64 = 1e-9;

/// Separating hyperplane (x, alpha) together with the product-term
/// decomposition used to measure it locally.
#[derive(Debug, Clone)]
pub struct Witness {
    pub x: HermitianOperator,
    pub alpha: f64,
    pub terms: Vec<SchmidtTerm>,
    /// Tr(rho_0 x) for the state the witness was built from.
    pub target_value: f64,
    pub dims: BipartiteDims,
}

impl Witness {
    pub fn margin(&self) -> f64 {
        self.target_value - self.alpha
    }
}

/// Exact supremum of Tr(x rho_1) over unit-trace PSD rho_1: the largest
/// eigenvalue of x.
pub fn sup_quantum(x: &HermitianOperator) -> f64 {
    x.lambda_max()
}

/// Build a witness for a beyond-quantum state.
pub fn build_witness(rho0: &BipartiteState) -> Result<Witness> {
    let dims = rho0.dims();
    let op = rho0.op();
    let eig = op.eig();
    let lambda_min = *eig.values.last().expect("dim >= 1");
    if lambda_min >= -DEFAULT_TOL {
        return Err(Error::StateIsQuantum);
    }

    let purity = op.hs_inner(op);
    let lambda_max = eig.values[0];

    let (x, alpha, target_value) = if purity > lambda_max {
        (op.clone(), lambda_max, purity)
    } else {
        // Negative eigenpart of rho_0: NSD, so the quantum supremum is 0,
        // while Tr(rho_0 x) = sum of squared negative eigenvalues > 0.
        let mut neg = DMatrix::<C64>::zeros(op.dim(), op.dim());
        let mut target = 0.0;
        for (k, &v) in eig.values.iter().enumerate() {
            if v < 0.0 {
                let col = eig.vectors.column(k);
                neg += (col * col.adjoint()).scale(v);
                target += v * v;
            }
        }
        (HermitianOperator::symmetrize(neg), 0.0, target)
    };

    let terms = operator_schmidt(&x, dims)?;
    let recon_err = (reconstruct(&terms, dims).matrix() - x.matrix()).norm();
    if recon_err > 1e-10 {
        return Err(Error::Internal(format!(
            "Schmidt reconstruction error {recon_err:.3e} exceeds 1e-10"
        )));
    }

    Ok(Witness {
        x,
        alpha,
        terms,
        target_value,
        dims,
    })
}

/// sum_k c_k Tr(rho A_k (x) B_k); agrees with Tr(rho x) to within round-off.
pub fn witness_value(w: &Witness, rho: &BipartiteState) -> Result<f64> {
    if rho.dims() != w.dims {
        return Err(Error::DimensionMismatch {
            expected: w.dims.total(),
            got: rho.dims().total(),
        });
    }
    let mut acc = 0.0;
    for t in &w.terms {
        acc += t.coeff * crate::herm::tensor(&t.op_a, &t.op_b).hs_inner(rho.op());
    }
    Ok(acc)
}

/// Empirical soundness sweep against random quantum states.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub n_samples: usize,
    pub max_observed: f64,
    pub alpha: f64,
    /// All sampled quantum states stayed below alpha + 1e-9.
    pub passed: bool,
    pub seed: u64,
}

/// Draw `n_samples` random quantum states (mixtures of Haar pure states) and
/// check that the witness never crosses alpha on them.
pub fn verify_witness(w: &Witness, n_samples: usize, seed: u64) -> VerifyReport {
    let dim = w.dims.total();
    // Evaluate through the measured decomposition, not the stored x.
    let x_terms = reconstruct(&w.terms, w.dims);
    let mut rng = random::rng_from_seed(seed);
    let mut max_observed = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let terms = rng.gen_range(1..=dim);
        let rho = random::random_density_rng(dim, terms, &mut rng);
        let v = x_terms.hs_inner(&rho);
        if v > max_observed {
            max_observed = v;
        }
    }
    VerifyReport {
        n_samples,
        max_observed,
        alpha: w.alpha,
        passed: max_observed <= w.alpha + 1e-9,
        seed,
    }
}
