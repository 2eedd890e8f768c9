//! Membership tests for the cone chain SEP in C in SEP*, state
//! classification, and samplers for the block-positive state space.
//!
//! PSD and PPT tests are exact (eigenvalue computations). Block positivity is
//! decided by an exact inner minimization over Bob's vector combined with a
//! grid-plus-refinement search over Alice's vector; for dA = 2 the Bloch
//! sphere makes the outer search effectively exhaustive, above that the
//! result is flagged heuristic.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::herm::{BipartiteDims, C64, HermitianOperator, partial_transpose};
use crate::random::{self, rng_from_seed};
use crate::state::BipartiteState;

/// Mutually exclusive classes of unit-trace bipartite operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    SeparableQuantum,
    EntangledQuantum,
    BeyondQuantum,
    OutsideSepStar,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateClass::SeparableQuantum => "SeparableQuantum",
            StateClass::EntangledQuantum => "EntangledQuantum",
            StateClass::BeyondQuantum => "BeyondQuantum",
            StateClass::OutsideSepStar => "OutsideSEPstar",
        };
        f.write_str(s)
    }
}

/// Outcome of the block-positivity search.
#[derive(Debug, Clone)]
pub struct BlockPositivityReport {
    pub is_member: bool,
    /// Minimum of <a (x) b| X |a (x) b> over the searched product vectors,
    /// with the inner minimization over b exact.
    pub min_value: f64,
    pub witness_a: DVector<C64>,
    pub witness_b: DVector<C64>,
    /// True when dA > 2 and the outer search cannot be exhaustive.
    pub heuristic: bool,
}

/// Search controls for [`is_block_positive`].
#[derive(Debug, Clone, Copy)]
pub struct BlockPositivitySearch {
    pub grid_points: usize,
    pub refine_starts: usize,
    pub refine_steps: usize,
    pub initial_step: f64,
    /// Seed for the outer sampling when dA > 2 (the Bloch grid is
    /// deterministic and ignores it).
    pub seed: u64,
}

impl Default for BlockPositivitySearch {
    fn default() -> Self {
        Self {
            grid_points: 2048,
            refine_starts: 8,
            refine_steps: 50,
            initial_step: 0.1,
            seed: 0,
        }
    }
}

/// Margin required of the rejection sampler: the partial transpose of the
/// sampled pure state must fail PPT by at least this much.
pub const ENTANGLEMENT_MARGIN: f64 = 1e-6;

/// True iff the smallest eigenvalue is at least -tol.
pub fn is_psd(x: &HermitianOperator, tol: f64) -> bool {
    x.lambda_min() >= -tol
}

/// Peres-Horodecki test: the partial transpose stays PSD.
pub fn is_ppt(x: &HermitianOperator, dims: BipartiteDims, tol: f64) -> Result<bool> {
    Ok(is_psd(&partial_transpose(x, dims)?, tol))
}

/// Separability for two qubits, where PPT is exact: PSD and PPT.
pub fn is_separable_2x2(x: &HermitianOperator, tol: f64) -> Result<bool> {
    if x.dim() != 4 {
        return Err(Error::UnsupportedDims {
            d_a: x.dim(),
            d_b: 1,
            reason: "the PPT criterion decides separability only for 2x2 local dimensions",
        });
    }
    let dims = BipartiteDims::new(2, 2)?;
    Ok(is_psd(x, tol) && is_ppt(x, dims, tol)?)
}

fn lambda_min_2x2(p: f64, r: f64, q: C64) -> f64 {
    let mid = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    mid - rad
}

/// Compress Alice's side: X_a = (<a| (x) I) X (|a> (x) I).
fn alice_compression(
    x: &DMatrix<C64>,
    dims: BipartiteDims,
    a: &DVector<C64>,
) -> DMatrix<C64> {
    let (da, db) = (dims.d_a, dims.d_b);
    DMatrix::from_fn(db, db, |b1, b2| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                acc += a[i].conj() * a[j] * x[(i * db + b1, j * db + b2)];
            }
        }
        acc
    })
}

fn min_over_bob(x: &DMatrix<C64>, dims: BipartiteDims, a: &DVector<C64>) -> f64 {
    let xa = alice_compression(x, dims, a);
    if dims.d_b == 2 {
        lambda_min_2x2(xa[(0, 0)].re, xa[(1, 1)].re, xa[(0, 1)])
    } else {
        HermitianOperator::symmetrize(xa).lambda_min()
    }
}

fn bloch_vectorize(theta: f64, phi: f64) -> DVector<C64> {
    DVector::from_vec(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
    ])
}

/// Block-positivity (SEP* membership) test. The inner minimization over Bob's
/// vector is an exact eigenvalue computation; the outer search over Alice's
/// vector uses a Fibonacci lattice on the Bloch sphere (dA = 2) or seeded
/// unit-sphere samples (dA > 2), then pattern-search refinement around the
/// best grid points.
pub fn is_block_positive(
    x: &HermitianOperator,
    dims: BipartiteDims,
    tol: f64,
    params: &BlockPositivitySearch,
) -> Result<BlockPositivityReport> {
    dims.check(x)?;
    let mat = x.matrix();
    let heuristic = dims.d_a > 2;
    let grid_points = params.grid_points.max(1);

    // coarse stage
    let mut scored: Vec<(f64, DVector<C64>)> = Vec::with_capacity(grid_points);
    if dims.d_a == 2 {
        let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        for i in 0..grid_points {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / grid_points as f64;
            let theta = z.acos();
            let phi = golden_angle * i as f64;
            let a = bloch_vectorize(theta, phi);
            scored.push((min_over_bob(mat, dims, &a), a));
        }
    } else {
        let mut rng = rng_from_seed(params.seed);
        for _ in 0..grid_points {
            let a = random::random_state_vector_rng(dims.d_a, &mut rng);
            scored.push((min_over_bob(mat, dims, &a), a));
        }
    }
    scored.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap_or(std::cmp::Ordering::Equal));

    // refinement stage
    let mut best = scored[0].clone();
    for start in scored.iter().take(params.refine_starts) {
        let refined = if dims.d_a == 2 {
            refine_bloch(mat, dims, &start.1, params)
        } else {
            refine_sphere(mat, dims, &start.1, params)
        };
        if refined.0 < best.0 {
            best = refined;
        }
    }

    let (min_value, witness_a) = best;
    let xa = HermitianOperator::symmetrize(alice_compression(mat, dims, &witness_a));
    let eig = xa.eig();
    let witness_b = eig.vectors.column(eig.values.len() - 1).clone_owned();

    Ok(BlockPositivityReport {
        is_member: min_value >= -tol,
        min_value,
        witness_a,
        witness_b,
        heuristic,
    })
}

fn refine_bloch(
    x: &DMatrix<C64>,
    dims: BipartiteDims,
    a0: &DVector<C64>,
    params: &BlockPositivitySearch,
) -> (f64, DVector<C64>) {
    // recover (theta, phi) from the spinor
    let mut theta = 2.0 * a0[0].re.clamp(-1.0, 1.0).acos();
    let mut phi = if a0[1].norm() > 1e-12 {
        a0[1].im.atan2(a0[1].re)
    } else {
        0.0
    };
    let mut best = min_over_bob(x, dims, a0);
    let mut step = params.initial_step;
    for _ in 0..params.refine_steps {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = bloch_vectorize(theta + dt, phi + dp);
            let v = min_over_bob(x, dims, &cand);
            if v < best {
                best = v;
                theta += dt;
                phi += dp;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (best, bloch_vectorize(theta, phi))
}

fn refine_sphere(
    x: &DMatrix<C64>,
    dims: BipartiteDims,
    a0: &DVector<C64>,
    params: &BlockPositivitySearch,
) -> (f64, DVector<C64>) {
    let mut a = a0.clone();
    let mut best = min_over_bob(x, dims, &a);
    let mut step = params.initial_step;
    for _ in 0..params.refine_steps {
        let mut moved = false;
        for k in 0..dims.d_a {
            for delta in [
                C64::new(step, 0.0),
                C64::new(-step, 0.0),
                C64::new(0.0, step),
                C64::new(0.0, -step),
            ] {
                let mut cand = a.clone();
                cand[k] += delta;
                let n = cand.norm();
                if n < 1e-12 {
                    continue;
                }
                cand = cand.unscale(n);
                let v = min_over_bob(x, dims, &cand);
                if v < best {
                    best = v;
                    a = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (best, a)
}

/// Classify a unit-trace bipartite operator against the cone chain.
/// Restricted to 2x2 local dimensions, where PPT decides separability and the
/// block-positivity search is effectively exhaustive.
pub fn classify_state(state: &BipartiteState, tol: f64) -> Result<StateClass> {
    let dims = state.dims();
    if dims.d_a != 2 || dims.d_b != 2 {
        return Err(Error::UnsupportedDims {
            d_a: dims.d_a,
            d_b: dims.d_b,
            reason: "classification is only decidable for 2x2 local dimensions",
        });
    }
    let op = state.op();
    if is_psd(op, tol) {
        if is_ppt(op, dims, tol)? {
            Ok(StateClass::SeparableQuantum)
        } else {
            Ok(StateClass::EntangledQuantum)
        }
    } else {
        let report = is_block_positive(op, dims, tol, &BlockPositivitySearch::default())?;
        if report.is_member {
            Ok(StateClass::BeyondQuantum)
        } else {
            Ok(StateClass::OutsideSepStar)
        }
    }
}

/// Half the swap operator: the unique maximizer of the same-axis Pauli
/// correlation sum over the block-positive state space.
pub fn rho_max() -> BipartiteState {
    let op = HermitianOperator::from_real(&[
        &[0.5, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.5, 0.0],
        &[0.0, 0.5, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.5],
    ])
    .expect("rho_max is Hermitian");
    BipartiteState::new(op, BipartiteDims::new(2, 2).expect("2x2"))
        .expect("rho_max has unit trace")
}

/// Extremal beyond-quantum state: the partial transpose of a Haar-random
/// entangled pure two-qubit state. Pure states too close to the separable
/// boundary (PPT margin under [`ENTANGLEMENT_MARGIN`]) are rejected and
/// redrawn.
pub fn random_beyond_quantum_pure_rng<R: Rng>(rng: &mut R) -> BipartiteState {
    let dims = BipartiteDims::new(2, 2).expect("2x2");
    loop {
        let pure = random::random_pure_state_rng(4, rng);
        let gamma = partial_transpose(&pure, dims).expect("dims match");
        if gamma.lambda_min() <= -ENTANGLEMENT_MARGIN {
            return BipartiteState::new(gamma, dims).expect("trace preserved");
        }
    }
}

pub fn random_beyond_quantum_pure(seed: u64) -> BipartiteState {
    random_beyond_quantum_pure_rng(&mut rng_from_seed(seed))
}

/// Random element of the block-positive state space: a convex mixture of
/// extremal points (partial transposes of entangled pure states, and pure
/// states).
pub fn random_sep_star_state_rng<R: Rng>(terms: usize, rng: &mut R) -> BipartiteState {
    let dims = BipartiteDims::new(2, 2).expect("2x2");
    let weights = random::simplex_weights_rng(terms.max(1), rng);
    let mut acc = HermitianOperator::zeros(4);
    for &w in &weights {
        let extremal = if rng.gen::<bool>() {
            random_beyond_quantum_pure_rng(rng).into_op()
        } else {
            random::random_pure_state_rng(4, rng)
        };
        acc = acc.add(&extremal.scale(w));
    }
    BipartiteState::new(acc, dims).expect("mixture of unit traces")
}

/// Random standard quantum state (PSD, unit trace) on 2x2.
pub fn random_ses_state_rng<R: Rng>(terms: usize, rng: &mut R) -> BipartiteState {
    let dims = BipartiteDims::new(2, 2).expect("2x2");
    BipartiteState::new(random::random_density_rng(4, terms, rng), dims)
        .expect("density matrices have unit trace")
}
