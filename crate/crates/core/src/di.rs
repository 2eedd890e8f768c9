//! Constructive demonstration that no device-independent test distinguishes a
//! block-positive state from standard quantum theory: given the state and any
//! local POVMs, produce a PSD state sigma and transported Bob POVMs with an
//! identical joint outcome distribution.
//!
//! Pipeline: restrict Alice to the range of her marginal, rescale the state so
//! the Alice marginal becomes maximally mixed, read off the Choi blocks of the
//! positive map F with rho' = (id (x) F)(Phi), then move F across the trace
//! pairing onto Bob's effects. sigma = (sqrt(r rho^A) (x) I) Phi (...) is PSD
//! by construction, so the simulating pair is standard quantum.

use nalgebra::DMatrix;

use crate::cones::{BlockPositivitySearch, is_block_positive};
use crate::error::{Error, Result};
use crate::herm::{
    BipartiteDims, C64, HermitianOperator, Side, partial_trace, tensor,
};
use crate::random::random_state_vector_rng;
use crate::state::BipartiteState;
use rand::Rng;

/// Relative rank threshold for the marginal's pseudo-inverse.
pub const RANK_TOL: f64 = 1e-10;

/// Validity tolerance for input POVMs.
pub const POVM_TOL: f64 = 1e-10;

/// Validity tolerance for transported POVMs (absorbs pseudo-inverse
/// conditioning).
pub const TRANSPORT_TOL: f64 = 1e-9;

/// A positive-operator-valued measure: PSD effects summing to identity.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidPovm("no effects".into()));
        }
        let dim = effects[0].dim();
        let mut sum = HermitianOperator::zeros(dim);
        for (k, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::InvalidPovm(format!(
                    "effect {k} has dimension {} but effect 0 has {dim}",
                    e.dim()
                )));
            }
            let lmin = e.lambda_min();
            if lmin < -tol {
                return Err(Error::InvalidPovm(format!(
                    "effect {k} has negative eigenvalue {lmin:.3e}"
                )));
            }
            sum = sum.add(e);
        }
        let dev = sum.max_abs_diff(&HermitianOperator::identity(dim));
        if dev > tol {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {dev:.3e}"
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Random POVM: Wishart effects renormalized by the inverse square root
    /// of their sum.
    pub fn random_rng<R: Rng>(dim: usize, outcomes: usize, rng: &mut R) -> Self {
        loop {
            let raw: Vec<DMatrix<C64>> = (0..outcomes)
                .map(|_| {
                    let g = DMatrix::from_fn(dim, dim, |_, _| {
                        C64::new(
                            rng.sample::<f64, _>(rand_distr::StandardNormal),
                            rng.sample::<f64, _>(rand_distr::StandardNormal),
                        )
                    });
                    &g * g.adjoint()
                })
                .collect();
            let mut sum = DMatrix::<C64>::zeros(dim, dim);
            for a in &raw {
                sum += a;
            }
            let eig = HermitianOperator::symmetrize(sum).eig();
            if eig.values.last().copied().unwrap_or(0.0) < 1e-8 {
                continue; // sum nearly singular; redraw
            }
            let inv_sqrt = {
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    dim,
                    eig.values.iter().map(|&v| C64::new(1.0 / v.sqrt(), 0.0)),
                ));
                &eig.vectors * d * eig.vectors.adjoint()
            };
            let effects = raw
                .into_iter()
                .map(|a| HermitianOperator::symmetrize(&inv_sqrt * a * &inv_sqrt))
                .collect();
            match Self::new(effects, POVM_TOL) {
                Ok(p) => return p,
                Err(_) => continue,
            }
        }
    }
}

/// Positive map in Choi-block form: F(e_ij) = d_in * B_ij where B_ij are the
/// blocks of a state whose Alice marginal is maximally mixed.
#[derive(Debug, Clone)]
pub struct PositiveMap {
    blocks: Vec<Vec<DMatrix<C64>>>,
    dim_in: usize,
    dim_out: usize,
}

impl PositiveMap {
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply_matrix(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::<C64>::zeros(self.dim_out, self.dim_out);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                out += self.blocks[i][j].scale(self.dim_in as f64) * x[(i, j)];
            }
        }
        out
    }

    /// F(X) for Hermitian X.
    pub fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        if x.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: x.dim(),
            });
        }
        Ok(HermitianOperator::symmetrize(self.apply_matrix(x.matrix())))
    }

    /// Adjoint under the trace pairing: Tr(F(X) Y) = Tr(X F^dag(Y)).
    /// Positive and unital whenever F is positive and trace preserving.
    pub fn apply_adjoint(&self, y: &HermitianOperator) -> Result<HermitianOperator> {
        if y.dim() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                got: y.dim(),
            });
        }
        let d = self.dim_in as f64;
        let out = DMatrix::from_fn(self.dim_in, self.dim_in, |i, j| {
            // F^dag(Y)_ij = d_in * Tr(B_ji Y)
            (self.blocks[j][i].clone() * y.matrix()).trace() * d
        });
        Ok(HermitianOperator::symmetrize(out))
    }

    /// (id (x) F)(Phi_din): reassembles the state the map was read from.
    pub fn choi_state(&self) -> HermitianOperator {
        let n = self.dim_in * self.dim_out;
        let mut out = DMatrix::<C64>::zeros(n, n);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let block = &self.blocks[i][j];
                for a in 0..self.dim_out {
                    for b in 0..self.dim_out {
                        out[(i * self.dim_out + a, j * self.dim_out + b)] = block[(a, b)];
                    }
                }
            }
        }
        HermitianOperator::symmetrize(out)
    }
}

/// Projector onto the range of a PSD operator, with the retained rank.
/// Eigenvalues at or below `rank_tol * lambda_max` count as zero.
pub fn range_projector(
    x: &HermitianOperator,
    rank_tol: f64,
) -> Result<(HermitianOperator, usize)> {
    let eig = x.eig();
    let lmax = eig.values[0];
    let lmin = *eig.values.last().expect("dim >= 1");
    if lmin < -1e-10 * lmax.max(1.0) {
        return Err(Error::NotPsd(lmin));
    }
    let rank = eig.values.iter().filter(|&&v| v > rank_tol * lmax).count();
    let mut p = DMatrix::<C64>::zeros(x.dim(), x.dim());
    for k in 0..rank {
        let col = eig.vectors.column(k);
        p += col * col.adjoint();
    }
    Ok((HermitianOperator::symmetrize(p), rank))
}

/// The rescaled state and everything needed to move between the full Alice
/// space and the range of her marginal.
#[derive(Debug, Clone)]
pub struct NormalizedState {
    /// Rescaled state on range(rho^A) (x) H_B, expressed in the descending
    /// eigenbasis of rho^A; its Alice marginal is I/rank.
    pub rho_prime: BipartiteState,
    /// Alice marginal of the input.
    pub rho_a: HermitianOperator,
    /// Projector onto range(rho^A) inside the full Alice space.
    pub projector: HermitianOperator,
    /// dA x rank isometry whose columns are the kept eigenvectors.
    pub isometry: DMatrix<C64>,
    /// Kept marginal eigenvalues, descending.
    pub lambdas: Vec<f64>,
}

/// Rescale rho_0 by the pseudo-inverse square root of its Alice marginal so
/// that the rescaled marginal is maximally mixed on the range.
pub fn normalize_state(rho0: &BipartiteState) -> Result<NormalizedState> {
    let dims = rho0.dims();
    let rho_a = partial_trace(rho0.op(), dims, Side::A)?;
    let eig = rho_a.eig();
    let lmax = eig.values[0];
    let lmin = *eig.values.last().expect("dim >= 1");
    if lmin < -1e-10 * lmax.max(1.0) {
        // A block-positive state always has a PSD marginal.
        return Err(Error::Internal(format!(
            "Alice marginal has negative eigenvalue {lmin:.3e}; input is not block positive"
        )));
    }
    let rank = eig.values.iter().filter(|&&v| v > RANK_TOL * lmax).count();
    let isometry = eig.vectors.columns(0, rank).clone_owned();
    let lambdas: Vec<f64> = eig.values[..rank].to_vec();
    let projector = HermitianOperator::symmetrize(&isometry * isometry.adjoint());

    // K = diag(1/sqrt(r lambda_i)) V^dag maps the full Alice space onto the
    // compressed range basis while applying the rescaling.
    let k = {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            rank,
            lambdas
                .iter()
                .map(|&l| C64::new(1.0 / (rank as f64 * l).sqrt(), 0.0)),
        ));
        d * isometry.adjoint()
    };
    let k_full = k.kronecker(&DMatrix::<C64>::identity(dims.d_b, dims.d_b));
    let compressed =
        HermitianOperator::symmetrize(&k_full * rho0.op().matrix() * k_full.adjoint());
    let prime_dims = BipartiteDims::new(rank, dims.d_b)?;

    let marginal = partial_trace(&compressed, prime_dims, Side::A)?;
    let dev = marginal
        .max_abs_diff(&HermitianOperator::identity(rank).scale(1.0 / rank as f64));
    if dev > 1e-10 {
        return Err(Error::Internal(format!(
            "rescaled marginal deviates from I/r by {dev:.3e}"
        )));
    }

    Ok(NormalizedState {
        rho_prime: BipartiteState::new(compressed, prime_dims)?,
        rho_a,
        projector,
        isometry,
        lambdas,
    })
}

/// Read the positive map off a state with maximally mixed Alice marginal:
/// F(e_ij) = d_in * B_ij, so (id (x) F)(Phi) gives the state back. Trace
/// preservation follows from the marginal condition.
pub fn choi_map_from_state(rho_prime: &BipartiteState) -> Result<PositiveMap> {
    let dims = rho_prime.dims();
    let (din, dout) = (dims.d_a, dims.d_b);
    let marginal = partial_trace(rho_prime.op(), dims, Side::A)?;
    let dev =
        marginal.max_abs_diff(&HermitianOperator::identity(din).scale(1.0 / din as f64));
    if dev > 1e-8 {
        return Err(Error::MarginalNotMaximallyMixed(dev));
    }
    let mat = rho_prime.op().matrix();
    let blocks = (0..din)
        .map(|i| {
            (0..din)
                .map(|j| {
                    DMatrix::from_fn(dout, dout, |a, b| mat[(i * dout + a, j * dout + b)])
                })
                .collect()
        })
        .collect();
    Ok(PositiveMap {
        blocks,
        dim_in: din,
        dim_out: dout,
    })
}

/// A standard quantum simulation of (rho_0, POVMs): sigma is PSD on
/// H_A (x) range(rho^A), Bob's POVMs are transported through F^dag, and the
/// joint distribution matches the original to within `max_deviation`.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub sigma: BipartiteState,
    pub bob_povms: Vec<Povm>,
    pub max_deviation: f64,
    /// Projector onto range(rho^A); sigma satisfies (P (x) I) sigma (P (x) I) = sigma.
    pub alice_projector: HermitianOperator,
    pub rank: usize,
}

/// Build the device-independent simulation for a block-positive state and
/// local POVM families.
pub fn build_simulation(
    rho0: &BipartiteState,
    povms_a: &[Povm],
    povms_b: &[Povm],
) -> Result<SimulationResult> {
    let dims = rho0.dims();
    for p in povms_a {
        if p.dim() != dims.d_a {
            return Err(Error::DimensionMismatch {
                expected: dims.d_a,
                got: p.dim(),
            });
        }
    }
    for p in povms_b {
        if p.dim() != dims.d_b {
            return Err(Error::DimensionMismatch {
                expected: dims.d_b,
                got: p.dim(),
            });
        }
    }

    let report = is_block_positive(rho0.op(), dims, 1e-8, &BlockPositivitySearch::default())?;
    if report.min_value < -1e-8 {
        return Err(Error::OutsideSepStar(format!(
            "product expectation {:.3e} is negative",
            report.min_value
        )));
    }

    let norm = normalize_state(rho0)?;
    let rank = norm.lambdas.len();
    let choi = choi_map_from_state(&norm.rho_prime)?;

    // sigma = (sqrt(r rho^A) (x) I) Phi_r (sqrt(r rho^A) (x) I), assembled in
    // the eigenbasis: sigma[(i,i),(j,j)] = sqrt(lambda_i lambda_j).
    let mut sigma_c = DMatrix::<C64>::zeros(rank * rank, rank * rank);
    for i in 0..rank {
        for j in 0..rank {
            sigma_c[(i * rank + i, j * rank + j)] =
                C64::new((norm.lambdas[i] * norm.lambdas[j]).sqrt(), 0.0);
        }
    }
    let embed = norm
        .isometry
        .kronecker(&DMatrix::<C64>::identity(rank, rank));
    let sigma_op = HermitianOperator::symmetrize(&embed * sigma_c * embed.adjoint());
    let sigma = BipartiteState::new(sigma_op, BipartiteDims::new(dims.d_a, rank)?)?;

    let bob_povms = povms_b
        .iter()
        .map(|p| {
            let effects = p
                .effects()
                .iter()
                .map(|n| choi.apply_adjoint(n))
                .collect::<Result<Vec<_>>>()?;
            Povm::new(effects, TRANSPORT_TOL).map_err(|e| {
                Error::OutsideSepStar(format!(
                    "transported Bob POVM is invalid ({e}); the input state admits no \
                     positive simulation map"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_deviation: f64 = 0.0;
    for pa in povms_a {
        for (pb, pb_prime) in povms_b.iter().zip(&bob_povms) {
            for m in pa.effects() {
                for (n, n_prime) in pb.effects().iter().zip(pb_prime.effects()) {
                    let p0 = tensor(m, n).hs_inner(rho0.op());
                    let p1 = tensor(m, n_prime).hs_inner(sigma.op());
                    max_deviation = max_deviation.max((p0 - p1).abs());
                }
            }
        }
    }

    Ok(SimulationResult {
        sigma,
        bob_povms,
        max_deviation,
        alice_projector: norm.projector,
        rank,
    })
}

/// Convenience used by tests and the CLI: a POVM list with a single random
/// entry per requested outcome count.
pub fn random_povms_rng<R: Rng>(
    dim: usize,
    outcome_counts: &[usize],
    rng: &mut R,
) -> Vec<Povm> {
    outcome_counts
        .iter()
        .map(|&k| Povm::random_rng(dim, k, rng))
        .collect()
}

/// Deterministic pure-state sanity input for simulations.
pub fn haar_product_state_rng<R: Rng>(dims: BipartiteDims, rng: &mut R) -> BipartiteState {
    let va = random_state_vector_rng(dims.d_a, rng);
    let vb = random_state_vector_rng(dims.d_b, rng);
    let pa = HermitianOperator::symmetrize(&va * va.adjoint());
    let pb = HermitianOperator::symmetrize(&vb * vb.adjoint());
    BipartiteState::new(tensor(&pa, &pb), dims).expect("product of pure states")
}
