//! Seeded samplers: Haar unitaries and pure states, mixed density matrices,
//! simplex weights. Every public entry point takes an explicit seed (or an
//! already-seeded generator) and is deterministic given it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::herm::{C64, HermitianOperator};

/// The deterministic generator used throughout.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// SplitMix64 step, used to derive independent sub-seeds from (seed, index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed unitary: complex Gaussian matrix, QR orthonormalization,
/// phases fixed by the sign of the R diagonal.
pub fn random_unitary_rng<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d.unscale(d.norm());
            let mut col = q.column_mut(j);
            for c in col.iter_mut() {
                *c *= phase;
            }
        }
    }
    q
}

pub fn random_unitary(dim: usize, seed: u64) -> DMatrix<C64> {
    random_unitary_rng(dim, &mut rng_from_seed(seed))
}

/// 2x2 unitary from Euler-style angles:
/// rows [cos(t/2), -e^{i l} sin(t/2)] and [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)].
pub fn su2_from_angles(theta: f64, phi: f64, lambda: f64) -> DMatrix<C64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |x: f64| C64::new(x.cos(), x.sin());
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            -e(lambda) * s,
            e(phi) * s,
            e(phi + lambda) * c,
        ],
    )
}

/// Deviation of U from unitarity, ||U^dag U - I||.
pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm()
}

/// Haar-random unit vector in C^dim.
pub fn random_state_vector_rng<R: Rng>(dim: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v.unscale(n);
        }
    }
}

/// Rank-1 projector onto a Haar-random vector: PSD, trace 1, purity 1.
pub fn random_pure_state_rng<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    let v = random_state_vector_rng(dim, rng);
    HermitianOperator::symmetrize(&v * v.adjoint())
}

pub fn random_pure_state(dim: usize, seed: u64) -> HermitianOperator {
    random_pure_state_rng(dim, &mut rng_from_seed(seed))
}

/// Uniform point on the probability simplex (normalized exponentials).
pub fn simplex_weights_rng<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Random density matrix as a mixture of `terms` Haar pure states with
/// uniform simplex weights.
pub fn random_density_rng<R: Rng>(dim: usize, terms: usize, rng: &mut R) -> HermitianOperator {
    let weights = simplex_weights_rng(terms.max(1), rng);
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for &w in &weights {
        let v = random_state_vector_rng(dim, rng);
        acc += (&v * v.adjoint()).scale(w);
    }
    HermitianOperator::symmetrize(acc)
}

pub fn random_density(dim: usize, terms: usize, seed: u64) -> HermitianOperator {
    random_density_rng(dim, terms, &mut rng_from_seed(seed))
}
