//! Acceptance suite. Each test covers one release criterion at its stated
//! tolerance and prints a single PASS line with the measured numbers
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use beyondq::cones::{
    StateClass, classify_state, random_beyond_quantum_pure, random_beyond_quantum_pure_rng,
    random_sep_star_state_rng, random_ses_state_rng, rho_max,
};
use beyondq::di::{Povm, build_simulation, random_povms_rng};
use beyondq::herm::{BipartiteDims, DEFAULT_TOL, HermitianOperator, max_entangled, pauli};
use beyondq::pauli::{ScanMethod, a_pauli_prime, max_a_pauli, same_axis_correlation_operator};
use beyondq::protocol::{NoiseModel, detection_power, pauli_pairs, run_protocol};
use beyondq::random::{random_pure_state_rng, rng_from_seed};
use beyondq::witness::{build_witness, verify_witness};
use beyondq::BipartiteState;
use rand::Rng;

fn dims22() -> BipartiteDims {
    BipartiteDims::new(2, 2).unwrap()
}

#[test]
fn criterion_1_golden_values() {
    // wall-clock includes everything from a cold call
    let t0 = Instant::now();
    let value = a_pauli_prime(&rho_max()).unwrap();
    let prime_time = t0.elapsed();
    assert!((value - 3.0).abs() <= 1e-12, "correlation sum {value}");

    let t1 = Instant::now();
    let lmax = same_axis_correlation_operator().lambda_max();
    let eig_time = t1.elapsed();
    assert!((lmax - 1.0).abs() <= 1e-12, "lambda_max {lmax}");

    assert!(
        prime_time.as_secs_f64() < 1e-3,
        "correlation sum took {prime_time:?}"
    );
    assert!(eig_time.as_secs_f64() < 1e-3, "lambda_max took {eig_time:?}");
    println!(
        "criterion 1 (golden values): PASS — sum {value} in {prime_time:?}, lambda_max {lmax} in {eig_time:?}"
    );
}

#[test]
fn criterion_2_scan_dichotomy() {
    let t0 = Instant::now();
    let mut min_margin = f64::INFINITY;
    for seed in 0..1000u64 {
        let bq = random_beyond_quantum_pure(seed);
        let res = max_a_pauli(&bq, ScanMethod::ClosedForm).unwrap();
        assert!(res.max_value > 1.0, "seed {seed}: {}", res.max_value);
        min_margin = min_margin.min(res.max_value - 1.0);
    }

    let mut rng = rng_from_seed(20_000);
    let mut max_quantum = f64::NEG_INFINITY;
    for k in 0..1000 {
        let state = if k % 2 == 0 {
            BipartiteState::new(random_pure_state_rng(4, &mut rng), dims22()).unwrap()
        } else {
            random_ses_state_rng(1 + k % 4, &mut rng)
        };
        let res = max_a_pauli(&state, ScanMethod::ClosedForm).unwrap();
        assert!(res.max_value <= 1.0 + 1e-9, "draw {k}: {}", res.max_value);
        max_quantum = max_quantum.max(res.max_value);
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 2 (scan dichotomy): PASS — min beyond-quantum margin {min_margin:.3e}, max quantum value {max_quantum:.12}, {elapsed:?}"
    );
}

#[test]
fn criterion_3_correlation_sum_maximum() {
    let mut rng = rng_from_seed(30_000);
    let mut max_seen = f64::NEG_INFINITY;
    for k in 0..100_000usize {
        let s = random_sep_star_state_rng(1 + k % 5, &mut rng);
        let v = a_pauli_prime(&s).unwrap();
        assert!(v <= 3.0 + 1e-9, "draw {k}: {v}");
        max_seen = max_seen.max(v);
    }
    let at_rho_max = a_pauli_prime(&rho_max()).unwrap();
    assert_eq!(at_rho_max, 3.0, "value at the maximizer");
    assert!(max_seen <= at_rho_max);
    println!(
        "criterion 3 (correlation-sum maximum): PASS — sampled max {max_seen:.9}, maximizer value {at_rho_max}"
    );
}

#[test]
fn criterion_4_simulation_construction() {
    // worked example: Swap/2 with projective Pauli measurements
    let id = HermitianOperator::identity(2);
    let pauli_povms: Vec<Povm> = pauli::all()
        .iter()
        .map(|s| {
            Povm::new(
                vec![id.add(s).scale(0.5), id.sub(s).scale(0.5)],
                beyondq::di::POVM_TOL,
            )
            .unwrap()
        })
        .collect();
    let sim = build_simulation(&rho_max(), &pauli_povms, &pauli_povms).unwrap();
    assert!(sim.max_deviation <= 1e-12, "deviation {}", sim.max_deviation);
    assert!(sim.sigma.op().max_abs_diff(&max_entangled(2)) <= 1e-12);
    for (orig, transported) in pauli_povms.iter().zip(&sim.bob_povms) {
        for (n, n_prime) in orig.effects().iter().zip(transported.effects()) {
            let nt = HermitianOperator::new(n.matrix().transpose()).unwrap();
            assert!(n_prime.max_abs_diff(&nt) <= 1e-12);
        }
    }

    // 200 seeded random instances
    let mut rng = rng_from_seed(40_000);
    let mut worst_deviation: f64 = 0.0;
    let mut worst_sigma_min: f64 = 0.0;
    for k in 0..200 {
        let bq = random_beyond_quantum_pure_rng(&mut rng);
        let counts_a = [rng.gen_range(2..=4), rng.gen_range(2..=4)];
        let counts_b = [rng.gen_range(2..=4), rng.gen_range(2..=4)];
        let povms_a = random_povms_rng(2, &counts_a, &mut rng);
        let povms_b = random_povms_rng(2, &counts_b, &mut rng);
        let sim = build_simulation(&bq, &povms_a, &povms_b).unwrap();
        let sigma_min = sim.sigma.op().lambda_min();
        assert!(sigma_min >= -1e-10, "instance {k}: sigma min eig {sigma_min}");
        assert!(
            sim.max_deviation <= 1e-9,
            "instance {k}: deviation {}",
            sim.max_deviation
        );
        worst_deviation = worst_deviation.max(sim.max_deviation);
        worst_sigma_min = worst_sigma_min.min(sigma_min);
    }
    println!(
        "criterion 4 (simulation construction): PASS — worked example exact, worst deviation {worst_deviation:.3e}, worst sigma eigenvalue {worst_sigma_min:.3e}"
    );
}

#[test]
fn criterion_5_witness_construction() {
    let w = build_witness(&rho_max()).unwrap();
    assert!((w.alpha - 0.5).abs() <= 1e-12);
    assert!((w.target_value - 1.0).abs() <= 1e-12);
    assert!((w.margin() - 0.5).abs() <= 1e-12);

    let mut rng = rng_from_seed(50_000);
    let mut min_margin = f64::INFINITY;
    let mut max_sweep_excess = f64::NEG_INFINITY;
    for k in 0..200u64 {
        // alternate extremal and noisy non-PSD targets
        let target = if k % 4 == 3 {
            loop {
                let bq = random_beyond_quantum_pure_rng(&mut rng);
                let noisy = bq.depolarize(0.98).unwrap();
                if classify_state(&noisy, DEFAULT_TOL).unwrap() == StateClass::BeyondQuantum {
                    break noisy;
                }
            }
        } else {
            random_beyond_quantum_pure_rng(&mut rng)
        };
        let w = build_witness(&target).unwrap();
        assert!(w.target_value > w.alpha, "instance {k}");
        min_margin = min_margin.min(w.margin());

        // Schmidt reconstruction everywhere
        let recon = beyondq::schmidt::reconstruct(&w.terms, w.dims);
        let err = (recon.matrix() - w.x.matrix()).norm();
        assert!(err <= 1e-10, "instance {k}: reconstruction {err}");

        let report = verify_witness(&w, 10_000, 50_000 + k);
        assert!(
            report.max_observed <= w.alpha,
            "instance {k}: sweep reached {} above alpha {}",
            report.max_observed,
            w.alpha
        );
        max_sweep_excess = max_sweep_excess.max(report.max_observed - w.alpha);
    }
    println!(
        "criterion 5 (witness construction): PASS — alpha 1/2 and target 1 on the reference state, min margin {min_margin:.3e}, max sweep value minus alpha {max_sweep_excess:.3e}"
    );
}

#[test]
fn criterion_6_protocol_simulation() {
    // zero-variance reference run at several n
    for n in [1usize, 7, 100, 10_000] {
        let report = run_protocol(&rho_max(), &pauli_pairs(), 1.0, n, 0, None).unwrap();
        assert_eq!(report.empirical_mean, 3.0, "n = {n}");
        assert_eq!(report.std_error, 0.0, "n = {n}");
        assert!(report.decision);
    }

    // determinism
    let a = run_protocol(
        &rho_max(),
        &pauli_pairs(),
        1.0,
        512,
        123,
        Some(NoiseModel { visibility: 0.4 }),
    )
    .unwrap();
    let b = run_protocol(
        &rho_max(),
        &pauli_pairs(),
        1.0,
        512,
        123,
        Some(NoiseModel { visibility: 0.4 }),
    )
    .unwrap();
    assert_eq!(a, b);

    // threshold behavior of the depolarized family: mean 3v against alpha 1
    let t0 = Instant::now();
    let at_threshold = detection_power(
        &rho_max(),
        &pauli_pairs(),
        1.0,
        10_000,
        1000,
        6,
        Some(NoiseModel {
            visibility: 1.0 / 3.0,
        }),
    )
    .unwrap();
    assert!(
        (at_threshold.power - 0.5).abs() <= 0.06,
        "power at threshold {}",
        at_threshold.power
    );

    let above = detection_power(
        &rho_max(),
        &pauli_pairs(),
        1.0,
        10_000,
        1000,
        6,
        Some(NoiseModel { visibility: 0.35 }),
    )
    .unwrap();
    assert!(above.power > 0.99, "power above threshold {}", above.power);
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 6 (protocol simulation): PASS — exact mean 3 with zero variance, power {:.3} at the threshold and {:.3} at margin 0.05, {elapsed:?}",
        at_threshold.power, above.power
    );
}

#[test]
fn criterion_7_oracle_equivalence() {
    let mut rng = rng_from_seed(70_000);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let s = random_sep_star_state_rng(1 + k % 4, &mut rng);
        let closed = max_a_pauli(&s, ScanMethod::ClosedForm).unwrap();
        let search = max_a_pauli(&s, ScanMethod::DirectSearch).unwrap();
        let gap = (closed.max_value - search.max_value).abs();
        assert!(
            gap <= 1e-6,
            "draw {k}: closed {} vs search {}",
            closed.max_value,
            search.max_value
        );
        worst = worst.max(gap);
    }
    println!("criterion 7 (oracle equivalence): PASS — worst method gap {worst:.3e}");
}
