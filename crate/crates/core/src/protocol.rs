//! Monte-Carlo implementation of the bipartite device-dependent detection
//! protocol: both parties cycle through their certified observable pairs,
//! sample outcomes round by round from the joint distribution, and compare
//! the rescaled outcome-product sum against the witness threshold.

use rand::Rng;

use crate::error::{Error, Result};
use crate::herm::{C64, HermitianOperator, tensor};
use crate::random::{derive_seed, rng_from_seed};
use crate::state::BipartiteState;
use crate::witness::Witness;
use nalgebra::DMatrix;

/// Eigenvalues closer than this are merged into one outcome.
pub const EIGENVALUE_GROUP_TOL: f64 = 1e-9;

/// Probabilities above this negative threshold are clamped to zero;
/// anything below aborts the run.
pub const PROBABILITY_CLAMP: f64 = -1e-10;
pub const PROBABILITY_ABORT: f64 = -1e-8;

/// A Hermitian observable with its spectral projectors and outcome values.
#[derive(Debug, Clone)]
pub struct Observable {
    pub op: HermitianOperator,
    pub projectors: Vec<HermitianOperator>,
    pub values: Vec<f64>,
}

/// Depolarizing noise: rho_v = v rho + (1 - v) I / (dA dB).
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    pub visibility: f64,
}

/// One protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    /// Rounds per observable pair.
    pub n: usize,
    /// Number of observable pairs.
    pub m: usize,
    /// (1/n) sum over all nm rounds of o^A o^B; estimates the summed
    /// pair expectations.
    pub empirical_mean: f64,
    /// CLT standard error from per-pair sample variances.
    pub std_error: f64,
    pub alpha: f64,
    /// empirical_mean > alpha.
    pub decision: bool,
    pub seed: u64,
}

/// Repeated-protocol detection frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub power: f64,
    pub trials: usize,
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// Spectral decomposition grouped by eigenvalue: mutually orthogonal
/// projectors summing to identity, one per distinct outcome.
pub fn spectral_observable(op: &HermitianOperator) -> Observable {
    let eig = op.eig();
    let mut projectors = Vec::new();
    let mut values = Vec::new();
    let mut k = 0;
    while k < eig.values.len() {
        let mut group_end = k + 1;
        while group_end < eig.values.len()
            && (eig.values[group_end] - eig.values[k]).abs() <= EIGENVALUE_GROUP_TOL
        {
            group_end += 1;
        }
        let mut p = DMatrix::<C64>::zeros(op.dim(), op.dim());
        let mut mean = 0.0;
        for idx in k..group_end {
            let col = eig.vectors.column(idx);
            p += col * col.adjoint();
            mean += eig.values[idx];
        }
        projectors.push(HermitianOperator::symmetrize(p));
        values.push(mean / (group_end - k) as f64);
        k = group_end;
    }
    Observable {
        op: op.clone(),
        projectors,
        values,
    }
}

/// Joint outcome table p(i, j) = Tr rho (P_i (x) Q_j). Entries within
/// round-off of zero are clamped; genuinely negative entries abort because
/// they certify the state is outside SEP* or the observables are invalid.
pub fn joint_distribution(
    rho: &BipartiteState,
    obs_a: &Observable,
    obs_b: &Observable,
) -> Result<Vec<Vec<f64>>> {
    let dims = rho.dims();
    if obs_a.op.dim() != dims.d_a || obs_b.op.dim() != dims.d_b {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: obs_a.op.dim() * obs_b.op.dim(),
        });
    }
    let mut table = vec![vec![0.0; obs_b.projectors.len()]; obs_a.projectors.len()];
    let mut sum = 0.0;
    for (i, p) in obs_a.projectors.iter().enumerate() {
        for (j, q) in obs_b.projectors.iter().enumerate() {
            let mut v = tensor(p, q).hs_inner(rho.op());
            if v < PROBABILITY_ABORT {
                return Err(Error::NegativeProbability(v));
            }
            if v < 0.0 {
                v = 0.0;
            }
            table[i][j] = v;
            sum += v;
        }
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "joint distribution sums to {sum}, not 1"
        )));
    }
    Ok(table)
}

/// Flattened per-pair sampling tables: cumulative probabilities in row-major
/// outcome order plus the matching outcome products.
struct PreparedPair {
    cumulative: Vec<f64>,
    products: Vec<f64>,
}

struct PreparedProtocol {
    pairs: Vec<PreparedPair>,
}

fn prepare(
    rho: &BipartiteState,
    terms: &[(HermitianOperator, HermitianOperator)],
) -> Result<PreparedProtocol> {
    if terms.is_empty() {
        return Err(Error::Internal("no observable pairs given".into()));
    }
    let mut pairs = Vec::with_capacity(terms.len());
    for (op_a, op_b) in terms {
        let obs_a = spectral_observable(op_a);
        let obs_b = spectral_observable(op_b);
        let table = joint_distribution(rho, &obs_a, &obs_b)?;
        let total: f64 = table.iter().flatten().sum();
        let mut cumulative = Vec::with_capacity(obs_a.values.len() * obs_b.values.len());
        let mut products = Vec::with_capacity(cumulative.capacity());
        let mut acc = 0.0;
        for (i, row) in table.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                acc += p / total;
                cumulative.push(acc);
                products.push(obs_a.values[i] * obs_b.values[j]);
            }
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        pairs.push(PreparedPair {
            cumulative,
            products,
        });
    }
    Ok(PreparedProtocol { pairs })
}

impl PreparedProtocol {
    fn run(&self, n: usize, alpha: f64, seed: u64) -> ProtocolReport {
        let m = self.pairs.len();
        let mut rng = rng_from_seed(seed);
        let mut total = 0.0;
        let mut pair_sums = vec![0.0; m];
        let mut pair_sq_sums = vec![0.0; m];
        // Rounds cycle k = 1..m, n full cycles.
        for _ in 0..n {
            for (k, pair) in self.pairs.iter().enumerate() {
                let u: f64 = rng.gen();
                let idx = pair
                    .cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(pair.cumulative.len() - 1);
                let o = pair.products[idx];
                total += o;
                pair_sums[k] += o;
                pair_sq_sums[k] += o * o;
            }
        }
        let empirical_mean = total / n as f64;
        let std_error = if n >= 2 {
            let mut var_sum = 0.0;
            for k in 0..m {
                let mean_k = pair_sums[k] / n as f64;
                let var_k =
                    (pair_sq_sums[k] - n as f64 * mean_k * mean_k) / (n as f64 - 1.0);
                var_sum += var_k.max(0.0);
            }
            (var_sum / n as f64).sqrt()
        } else {
            0.0
        };
        ProtocolReport {
            n,
            m,
            empirical_mean,
            std_error,
            alpha,
            decision: empirical_mean > alpha,
            seed,
        }
    }
}

/// Simulate nm rounds of the detection protocol on a (possibly depolarized)
/// target state.
pub fn run_protocol(
    rho: &BipartiteState,
    terms: &[(HermitianOperator, HermitianOperator)],
    alpha: f64,
    n: usize,
    seed: u64,
    noise: Option<NoiseModel>,
) -> Result<ProtocolReport> {
    if n == 0 {
        return Err(Error::Internal("need at least one round per pair".into()));
    }
    let rho_v = match noise {
        Some(nm) => rho.depolarize(nm.visibility)?,
        None => rho.clone(),
    };
    Ok(prepare(&rho_v, terms)?.run(n, alpha, seed))
}

/// Fraction of independent protocol runs that report detection. Trial t uses
/// the sub-seed derived from (seed, t).
pub fn detection_power(
    rho: &BipartiteState,
    terms: &[(HermitianOperator, HermitianOperator)],
    alpha: f64,
    n: usize,
    trials: usize,
    seed: u64,
    noise: Option<NoiseModel>,
) -> Result<PowerReport> {
    if trials == 0 {
        return Err(Error::Internal("need at least one trial".into()));
    }
    let rho_v = match noise {
        Some(nm) => rho.depolarize(nm.visibility)?,
        None => rho.clone(),
    };
    let prepared = prepare(&rho_v, terms)?;
    let mut hits = 0usize;
    for t in 0..trials {
        let report = prepared.run(n, alpha, derive_seed(seed, t as u64));
        if report.decision {
            hits += 1;
        }
    }
    Ok(PowerReport {
        power: hits as f64 / trials as f64,
        trials,
        n,
        alpha,
        seed,
    })
}

/// Observable pairs realizing a witness: the Schmidt coefficient is folded
/// into Alice's operator, so the summed pair expectations equal the witness
/// value.
pub fn witness_observable_pairs(w: &Witness) -> Vec<(HermitianOperator, HermitianOperator)> {
    w.terms
        .iter()
        .map(|t| (t.op_a.scale(t.coeff), t.op_b.clone()))
        .collect()
}

/// The three same-axis Pauli pairs used for the closed-form two-qubit
/// detection.
pub fn pauli_pairs() -> Vec<(HermitianOperator, HermitianOperator)> {
    crate::herm::pauli::all()
        .into_iter()
        .map(|s| (s.clone(), s))
        .collect()
}
