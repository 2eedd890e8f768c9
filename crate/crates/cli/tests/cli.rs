//! End-to-end tests of the binary: every subcommand, the documented exit
//! codes, stdin piping, and the generator/classifier round trips.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use beyondq::di::{POVM_TOL, Povm};
use beyondq::herm::{HermitianOperator, pauli};
use beyondq::json::PovmListDto;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_beyondq");

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary spawns");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("binary exits")
}

fn run_ok(args: &[&str], stdin: Option<&str>) -> Value {
    let out = run(args, stdin);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_rho_max_emits_the_expected_matrix() {
    let v = run_ok(&["gen", "rho-max"], None);
    assert_eq!(v["dims"], serde_json::json!([2, 2]));
    assert_eq!(v["re"][0][0], 0.5);
    assert_eq!(v["re"][1][2], 0.5);
    assert_eq!(v["re"][1][1], 0.0);
    // repeated generation is byte-identical
    let a = run(&["gen", "rho-max"], None).stdout;
    let b = run(&["gen", "rho-max"], None).stdout;
    assert_eq!(a, b);
}

#[test]
fn classify_round_trips_through_every_generator() {
    let rho_max = run(&["gen", "rho-max"], None).stdout;
    let v = run_ok(
        &["classify", "-i", "-"],
        Some(std::str::from_utf8(&rho_max).unwrap()),
    );
    assert_eq!(v["class"], "BeyondQuantum");
    assert!((v["lambda_min"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    let phi = run(&["gen", "phi"], None).stdout;
    let v = run_ok(
        &["classify", "-i", "-"],
        Some(std::str::from_utf8(&phi).unwrap()),
    );
    assert_eq!(v["class"], "EntangledQuantum");

    let bq = run(&["gen", "random-bq-pure", "--seed", "5"], None).stdout;
    let bq_text = String::from_utf8(bq).unwrap();
    let parsed: Value = serde_json::from_str(&bq_text).unwrap();
    assert_eq!(parsed["seed"], 5);
    let v = run_ok(&["classify", "-i", "-"], Some(&bq_text));
    assert_eq!(v["class"], "BeyondQuantum");

    // same seed, same bytes
    let again = run(&["gen", "random-bq-pure", "--seed", "5"], None).stdout;
    assert_eq!(bq_text.as_bytes(), &again[..]);
}

#[test]
fn depolarized_reference_state_becomes_separable() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("rho.json");
    let out = run(
        &["gen", "rho-max", "-o", state_path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());

    let mixed = run_ok(
        &[
            "gen",
            "depolarize",
            "-i",
            state_path.to_str().unwrap(),
            "--visibility",
            "0.2",
        ],
        None,
    );
    let v = run_ok(&["classify", "-i", "-"], Some(&mixed.to_string()));
    assert_eq!(v["class"], "SeparableQuantum");
}

#[test]
fn witness_build_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("rho.json");
    let witness_path = dir.path().join("witness.json");
    run(&["gen", "rho-max", "-o", state_path.to_str().unwrap()], None);

    let out = run(
        &[
            "witness",
            "build",
            "-i",
            state_path.to_str().unwrap(),
            "-o",
            witness_path.to_str().unwrap(),
        ],
        None,
    );
    // -o writes the file and leaves stdout empty
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&witness_path).unwrap();
    let w: Value = serde_json::from_str(&text).unwrap();
    assert!((w["alpha"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((w["target_value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((w["margin"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let v = run_ok(
        &[
            "witness",
            "eval",
            "--witness",
            witness_path.to_str().unwrap(),
            "-i",
            state_path.to_str().unwrap(),
        ],
        None,
    );
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v["exceeds_alpha"], true);

    // maximally mixed probe: value 1/4, below threshold
    let mixed = run_ok(
        &[
            "gen",
            "depolarize",
            "-i",
            state_path.to_str().unwrap(),
            "--visibility",
            "0",
        ],
        None,
    );
    let v = run_ok(
        &[
            "witness",
            "eval",
            "--witness",
            witness_path.to_str().unwrap(),
            "-i",
            "-",
        ],
        Some(&mixed.to_string()),
    );
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert_eq!(v["exceeds_alpha"], false);
}

#[test]
fn di_simulate_reproduces_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("rho.json");
    run(&["gen", "rho-max", "-o", state_path.to_str().unwrap()], None);

    let id = HermitianOperator::identity(2);
    let povms: Vec<Povm> = pauli::all()
        .iter()
        .map(|s| {
            Povm::new(vec![id.add(s).scale(0.5), id.sub(s).scale(0.5)], POVM_TOL).unwrap()
        })
        .collect();
    let povm_path = dir.path().join("povms.json");
    std::fs::write(
        &povm_path,
        serde_json::to_string(&PovmListDto::from_povms(&povms)).unwrap(),
    )
    .unwrap();

    let v = run_ok(
        &[
            "di-simulate",
            "-i",
            state_path.to_str().unwrap(),
            "--povms-a",
            povm_path.to_str().unwrap(),
            "--povms-b",
            povm_path.to_str().unwrap(),
        ],
        None,
    );
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["rank"], 2);
    // sigma is the maximally entangled state
    assert!((v["sigma"]["re"][0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["sigma"]["re"][0][3].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["sigma"]["re"][1][1].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn pauli_scan_both_methods() {
    let rho_max = String::from_utf8(run(&["gen", "rho-max"], None).stdout).unwrap();
    let closed = run_ok(&["pauli-scan", "-i", "-"], Some(&rho_max));
    assert!((closed["a_prime"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((closed["max_value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(closed["method"], "closed-form");
    assert_eq!(closed["correlation"][0][0], 1.0);

    let search = run_ok(
        &["pauli-scan", "-i", "-", "--method", "search"],
        Some(&rho_max),
    );
    assert_eq!(search["method"], "search");
    assert!(
        (search["max_value"].as_f64().unwrap() - closed["max_value"].as_f64().unwrap()).abs()
            <= 1e-6
    );
}

#[test]
fn protocol_run_and_power() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("rho.json");
    let witness_path = dir.path().join("witness.json");
    run(&["gen", "rho-max", "-o", state_path.to_str().unwrap()], None);
    run(
        &[
            "witness",
            "build",
            "-i",
            state_path.to_str().unwrap(),
            "-o",
            witness_path.to_str().unwrap(),
        ],
        None,
    );

    let v = run_ok(
        &[
            "protocol",
            "run",
            "--state",
            state_path.to_str().unwrap(),
            "--witness",
            witness_path.to_str().unwrap(),
            "--n",
            "100",
            "--seed",
            "9",
        ],
        None,
    );
    assert!((v["empirical_mean"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["decision"], true);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["m"], 4);

    let power = run_ok(
        &[
            "protocol",
            "run",
            "--state",
            state_path.to_str().unwrap(),
            "--witness",
            witness_path.to_str().unwrap(),
            "--n",
            "200",
            "--trials",
            "20",
        ],
        None,
    );
    assert_eq!(power["power"], 1.0);
    assert_eq!(power["trials"], 20);

    // fully depolarized: mean 1/4 < alpha 1/2, never detects
    let none = run_ok(
        &[
            "protocol",
            "run",
            "--state",
            state_path.to_str().unwrap(),
            "--witness",
            witness_path.to_str().unwrap(),
            "--n",
            "200",
            "--trials",
            "20",
            "--visibility",
            "0",
        ],
        None,
    );
    assert_eq!(none["power"], 0.0);
}

#[test]
fn exit_codes_match_the_contract() {
    // domain error: missing file
    let out = run(&["classify", "-i", "/nonexistent/state.json"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    // domain error: malformed JSON names the position
    let out = run(&["classify", "-i", "-"], Some("{\"dim\": 4, \"re\": [[1,2]"));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line"), "stderr: {stderr}");

    // domain error: state without dims
    let out = run(
        &["classify", "-i", "-"],
        Some("{\"dim\": 1, \"re\": [[1.0]]}"),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dims"), "stderr: {stderr}");

    // domain error: classification outside 2x2
    let phi3 = String::from_utf8(run(&["gen", "phi", "--dim", "3"], None).stdout).unwrap();
    let out = run(&["classify", "-i", "-"], Some(&phi3));
    assert_eq!(out.status.code(), Some(1));

    // usage error: unknown flag
    let out = run(&["classify", "--nope"], None);
    assert_eq!(out.status.code(), Some(2));

    // usage error: unknown subcommand
    let out = run(&["frobnicate"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn float_payloads_survive_a_parse_and_emit_cycle() {
    // visibility 1 leaves the state numerically untouched, so piping through
    // depolarize exercises parse -> operator -> emit on nontrivial floats
    let original = String::from_utf8(run(&["gen", "random-bq-pure", "--seed", "11"], None).stdout)
        .unwrap();
    let cycled = run_ok(
        &["gen", "depolarize", "-i", "-", "--visibility", "1"],
        Some(&original),
    );
    let original: Value = serde_json::from_str(&original).unwrap();
    assert_eq!(original["re"], cycled["re"]);
    assert_eq!(original["im"], cycled["im"]);
    assert_eq!(original["dims"], cycled["dims"]);
}

#[test]
fn witness_build_rejects_quantum_input() {
    let phi = String::from_utf8(run(&["gen", "phi"], None).stdout).unwrap();
    let out = run(&["witness", "build", "-i", "-"], Some(&phi));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("positive semi-definite"), "stderr: {stderr}");
}
