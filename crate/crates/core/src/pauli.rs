//! Two-qubit detection by same-axis Pauli correlations: the functional
//! sum_c <sigma_c (x) sigma_c>, its maximization over local unitaries, and
//! the SU(2) <-> SO(3) adjoint correspondence that turns the unitary scan
//! into a rotation problem on the 3x3 correlation matrix.
//!
//! For a state rho with correlation matrix T_cd = Tr rho (sigma_c (x) sigma_d)
//! and local rotations R_A, R_B (the adjoint images of U_A, U_B), the
//! functional equals Tr(R_A T R_B^T). Its maximum over SO(3) x SO(3) is
//! s1 + s2 + sign(det T) s3 in the singular values of T; a witnessing rotation
//! comes from the sign-corrected orthogonal Procrustes solution.

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::herm::{C64, HermitianOperator, pauli, tensor};
use crate::random::unitarity_deviation;
use crate::state::BipartiteState;

/// How a scan maximum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    ClosedForm,
    DirectSearch,
}

/// Result of maximizing the same-axis Pauli correlation sum over local
/// unitaries.
#[derive(Debug, Clone)]
pub struct PauliScanResult {
    pub max_value: f64,
    pub u_a: DMatrix<C64>,
    pub u_b: DMatrix<C64>,
    /// T_cd = Tr rho (sigma_c (x) sigma_d).
    pub correlation: Matrix3<f64>,
    pub method: ScanMethod,
}

fn require_two_qubits(rho: &BipartiteState) -> Result<()> {
    let dims = rho.dims();
    if dims.d_a != 2 || dims.d_b != 2 {
        return Err(Error::UnsupportedDims {
            d_a: dims.d_a,
            d_b: dims.d_b,
            reason: "the Pauli correlation functional is defined on two qubits",
        });
    }
    Ok(())
}

/// The 4x4 operator sum_c sigma_c (x) sigma_c. Its trace against a state is
/// the unrotated correlation sum; its largest eigenvalue is 1, which bounds
/// the functional on all PSD states.
pub fn same_axis_correlation_operator() -> HermitianOperator {
    let mut acc = HermitianOperator::zeros(4);
    for s in pauli::all() {
        acc = acc.add(&tensor(&s, &s));
    }
    acc
}

/// sum_c Tr rho (sigma_c (x) sigma_c).
pub fn a_pauli_prime(rho: &BipartiteState) -> Result<f64> {
    require_two_qubits(rho)?;
    Ok(same_axis_correlation_operator().hs_inner(rho.op()))
}

/// sum_c Tr (U_A (x) U_B) rho (U_A (x) U_B)^dag (sigma_c (x) sigma_c).
pub fn a_pauli(rho: &BipartiteState, u_a: &DMatrix<C64>, u_b: &DMatrix<C64>) -> Result<f64> {
    require_two_qubits(rho)?;
    for u in [u_a, u_b] {
        if u.nrows() != 2 || u.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: u.nrows().max(u.ncols()),
            });
        }
        let dev = unitarity_deviation(u);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
    }
    let w = u_a.kronecker(u_b);
    let rotated = HermitianOperator::symmetrize(&w * rho.op().matrix() * w.adjoint());
    Ok(same_axis_correlation_operator().hs_inner(&rotated))
}

/// T_cd = Tr rho (sigma_c (x) sigma_d).
pub fn correlation_matrix(rho: &BipartiteState) -> Result<Matrix3<f64>> {
    require_two_qubits(rho)?;
    let paulis = pauli::all();
    Ok(Matrix3::from_fn(|c, d| {
        tensor(&paulis[c], &paulis[d]).hs_inner(rho.op())
    }))
}

/// Adjoint rotation of a 2x2 unitary: R_cd with U^dag sigma_c U = sum_d R_cd sigma_d.
pub fn so3_from_su2(u: &DMatrix<C64>) -> Matrix3<f64> {
    let paulis = pauli::all();
    Matrix3::from_fn(|c, d| {
        let conj = HermitianOperator::symmetrize(u.adjoint() * paulis[c].matrix() * u);
        0.5 * conj.hs_inner(&paulis[d])
    })
}

/// Lift a proper rotation back to a 2x2 unitary with that adjoint action.
/// The global phase (overall sign) is free.
pub fn su2_from_so3(r: &Matrix3<f64>) -> Result<DMatrix<C64>> {
    let ortho_dev = (r.transpose() * r - Matrix3::identity()).norm();
    let det_dev = (r.determinant() - 1.0).abs();
    if ortho_dev > 1e-8 || det_dev > 1e-8 {
        return Err(Error::NotRotation(ortho_dev.max(det_dev)));
    }
    // Quaternion (w, v) with U = w I - i v.sigma; derived from
    // R_cd = (w^2-|v|^2) d_cd + 2 v_c v_d + 2 w eps_{dcb} v_b.
    let tr = r.trace();
    let (w, vx, vy, vz);
    if tr >= r[(0, 0)].max(r[(1, 1)]).max(r[(2, 2)]) {
        w = 0.5 * (1.0 + tr).max(0.0).sqrt();
        let s = 1.0 / (4.0 * w);
        vx = (r[(2, 1)] - r[(1, 2)]) * s;
        vy = (r[(0, 2)] - r[(2, 0)]) * s;
        vz = (r[(1, 0)] - r[(0, 1)]) * s;
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        vx = 0.5 * (1.0 + 2.0 * r[(0, 0)] - tr).max(0.0).sqrt();
        let s = 1.0 / (4.0 * vx);
        w = (r[(2, 1)] - r[(1, 2)]) * s;
        vy = (r[(0, 1)] + r[(1, 0)]) * s;
        vz = (r[(0, 2)] + r[(2, 0)]) * s;
    } else if r[(1, 1)] >= r[(2, 2)] {
        vy = 0.5 * (1.0 + 2.0 * r[(1, 1)] - tr).max(0.0).sqrt();
        let s = 1.0 / (4.0 * vy);
        w = (r[(0, 2)] - r[(2, 0)]) * s;
        vx = (r[(0, 1)] + r[(1, 0)]) * s;
        vz = (r[(1, 2)] + r[(2, 1)]) * s;
    } else {
        vz = 0.5 * (1.0 + 2.0 * r[(2, 2)] - tr).max(0.0).sqrt();
        let s = 1.0 / (4.0 * vz);
        w = (r[(1, 0)] - r[(0, 1)]) * s;
        vx = (r[(0, 2)] + r[(2, 0)]) * s;
        vy = (r[(1, 2)] + r[(2, 1)]) * s;
    }
    let norm = (w * w + vx * vx + vy * vy + vz * vz).sqrt();
    let (w, vx, vy, vz) = (w / norm, vx / norm, vy / norm, vz / norm);
    Ok(DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(w, -vz),
            C64::new(-vy, -vx),
            C64::new(vy, -vx),
            C64::new(w, vz),
        ],
    ))
}

/// Maximize the Pauli correlation sum over local unitaries.
pub fn max_a_pauli(rho: &BipartiteState, method: ScanMethod) -> Result<PauliScanResult> {
    let t = correlation_matrix(rho)?;
    match method {
        ScanMethod::ClosedForm => closed_form_scan(&t),
        ScanMethod::DirectSearch => Ok(direct_search_scan(&t)),
    }
}

fn closed_form_scan(t: &Matrix3<f64>) -> Result<PauliScanResult> {
    let svd = t.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let sign = u.determinant() * v_t.determinant();
    let max_value = s[0] + s[1] + sign * s[2];
    // Procrustes maximizer of Tr(T R): R = V diag(1,1,sign) U^T. Applied on
    // Alice's side with Bob left alone.
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, sign));
    let r_a = v_t.transpose() * d * u.transpose();
    let u_a = su2_from_so3(&r_a)?;
    Ok(PauliScanResult {
        max_value,
        u_a,
        u_b: DMatrix::identity(2, 2),
        correlation: *t,
        method: ScanMethod::ClosedForm,
    })
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn euler_zyz(angles: &[f64; 3]) -> Matrix3<f64> {
    rot_z(angles[0]) * rot_y(angles[1]) * rot_z(angles[2])
}

fn objective(t: &Matrix3<f64>, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (euler_zyz(a) * t * euler_zyz(b).transpose()).trace()
}

/// Independent oracle: coarse grid over Alice's Euler angles (the value only
/// depends on R_B^T R_A, so Bob can start at identity without loss), then
/// pattern search over all six angles.
fn direct_search_scan(t: &Matrix3<f64>) -> PauliScanResult {
    const GRID: usize = 20;
    let mut starts: Vec<(f64, [f64; 3])> = Vec::with_capacity(GRID * GRID * GRID);
    let b0 = [0.0; 3];
    for i in 0..GRID {
        for j in 0..GRID {
            for k in 0..GRID {
                let a = [
                    2.0 * std::f64::consts::PI * i as f64 / GRID as f64,
                    std::f64::consts::PI * j as f64 / GRID as f64,
                    2.0 * std::f64::consts::PI * k as f64 / GRID as f64,
                ];
                starts.push((objective(t, &a, &b0), a));
            }
        }
    }
    starts.sort_by(|l, r| r.0.partial_cmp(&l.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut best_val = f64::NEG_INFINITY;
    let mut best_angles = ([0.0; 3], [0.0; 3]);
    for (_, a_start) in starts.iter().take(8) {
        let (val, a, b) = pattern_search_6d(t, *a_start, b0);
        if val > best_val {
            best_val = val;
            best_angles = (a, b);
        }
    }

    let r_a = euler_zyz(&best_angles.0);
    let r_b = euler_zyz(&best_angles.1);
    PauliScanResult {
        max_value: best_val,
        u_a: su2_from_so3(&r_a).expect("Euler product is a rotation"),
        u_b: su2_from_so3(&r_b).expect("Euler product is a rotation"),
        correlation: *t,
        method: ScanMethod::DirectSearch,
    }
}

fn pattern_search_6d(
    t: &Matrix3<f64>,
    mut a: [f64; 3],
    mut b: [f64; 3],
) -> (f64, [f64; 3], [f64; 3]) {
    const MAX_STEP: f64 = std::f64::consts::PI / 10.0;
    let mut best = objective(t, &a, &b);
    let mut step = std::f64::consts::PI / 20.0;
    for _ in 0..300 {
        let mut moved = false;
        // single-angle moves
        for idx in 0..6 {
            for dir in [step, -step] {
                let (mut ca, mut cb) = (a, b);
                if idx < 3 {
                    ca[idx] += dir;
                } else {
                    cb[idx - 3] += dir;
                }
                let v = objective(t, &ca, &cb);
                if v > best {
                    best = v;
                    a = ca;
                    b = cb;
                    moved = true;
                }
            }
        }
        // paired (alpha, gamma) moves: near beta = 0 the two z-angles act
        // together, and single-coordinate steps stall on that ridge
        for side in 0..2 {
            for (da, dg) in [(step, step), (step, -step), (-step, step), (-step, -step)] {
                let (mut ca, mut cb) = (a, b);
                let angles = if side == 0 { &mut ca } else { &mut cb };
                angles[0] += da;
                angles[2] += dg;
                let v = objective(t, &ca, &cb);
                if v > best {
                    best = v;
                    a = ca;
                    b = cb;
                    moved = true;
                }
            }
        }
        if moved {
            step = (step * 2.0).min(MAX_STEP);
        } else {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    (best, a, b)
}
