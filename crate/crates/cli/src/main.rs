//! Command-line front-end: state generation, classification, witness
//! construction/evaluation, device-independent simulation, Pauli scanning,
//! and protocol Monte-Carlo. All numeric work lives in the library; this
//! binary only parses arguments, moves JSON, and maps errors to exit codes
//! (0 success, 1 domain error, 2 usage error).

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use beyondq::cones::{
    BlockPositivitySearch, classify_state, is_block_positive, random_beyond_quantum_pure,
    rho_max,
};
use beyondq::di::{POVM_TOL, build_simulation};
use beyondq::herm::{BipartiteDims, DEFAULT_TOL, max_entangled};
use beyondq::json::{MatrixDto, PovmListDto, WitnessDto};
use beyondq::pauli::{ScanMethod, a_pauli_prime, max_a_pauli};
use beyondq::protocol::{NoiseModel, detection_power, run_protocol, witness_observable_pairs};
use beyondq::witness::{build_witness, witness_value};
use beyondq::BipartiteState;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{Value, json};

#[derive(Parser)]
#[command(
    name = "beyondq",
    about = "Detect beyond-quantum bipartite states: classification, witnesses, simulations, protocols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a bipartite state against the cone chain SEP in C in SEP*
    Classify(ClassifyArgs),
    /// Build or evaluate a detection witness
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Construct the standard-quantum simulation of a state with local POVMs
    DiSimulate(DiArgs),
    /// Evaluate and maximize the two-qubit Pauli correlation sum
    PauliScan(ScanArgs),
    /// Run the bipartite detection protocol
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Generate reference and random states
    #[command(subcommand)]
    Gen(GenCmd),
}

#[derive(Args)]
struct ClassifyArgs {
    /// State file, or "-" for standard input
    #[arg(short, long)]
    input: String,
    /// Tolerance for the PSD and block-positivity decisions
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Build a witness for a beyond-quantum state
    Build {
        #[arg(short, long)]
        input: String,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Evaluate a witness on a state
    Eval {
        /// Witness file produced by `witness build`
        #[arg(long)]
        witness: String,
        #[arg(short, long)]
        input: String,
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Args)]
struct DiArgs {
    /// State file, or "-" for standard input
    #[arg(short, long)]
    input: String,
    /// Alice POVM list file
    #[arg(long)]
    povms_a: String,
    /// Bob POVM list file
    #[arg(long)]
    povms_b: String,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    ClosedForm,
    Search,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(short, long)]
    input: String,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    method: MethodArg,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum ProtocolCmd {
    /// Simulate nm protocol rounds against a witness threshold
    Run {
        #[arg(long)]
        state: String,
        #[arg(long)]
        witness: String,
        /// Rounds per observable pair
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depolarizing visibility applied to the state before sampling
        #[arg(long)]
        visibility: Option<f64>,
        /// With more than one trial, report the detection frequency instead
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Override the witness threshold
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Half the swap operator, the reference beyond-quantum state
    RhoMax {
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Maximally entangled state on (d, d)
    Phi {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Random extremal beyond-quantum pure state
    RandomBqPure {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Mix a state with white noise: v rho + (1-v) I/(dA dB)
    Depolarize {
        #[arg(short, long)]
        input: String,
        #[arg(long)]
        visibility: f64,
        #[arg(short, long)]
        output: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, output)) => {
            let text = value.to_string();
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text + "\n") {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read standard input: {e}"))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    }
}

fn parse_state(path: &str) -> Result<BipartiteState, String> {
    let text = read_input(path)?;
    let dto: MatrixDto =
        serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    dto.to_state().map_err(|e| format!("{path}: {e}"))
}

fn parse_witness(path: &str) -> Result<beyondq::witness::Witness, String> {
    let text = read_input(path)?;
    let dto: WitnessDto =
        serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    dto.to_witness().map_err(|e| format!("{path}: {e}"))
}

fn parse_povms(path: &str) -> Result<Vec<beyondq::di::Povm>, String> {
    let text = read_input(path)?;
    let dto: PovmListDto =
        serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    dto.to_povms(POVM_TOL).map_err(|e| format!("{path}: {e}"))
}

fn state_value(state: &BipartiteState) -> Value {
    serde_json::to_value(MatrixDto::from_state(state)).expect("state serializes")
}

fn complex_matrix_value(m: &DMatrix<nalgebra::Complex<f64>>) -> Value {
    let re: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    json!({ "re": re, "im": im })
}

fn run(command: Command) -> Result<(Value, Option<String>), String> {
    match command {
        Command::Classify(args) => {
            let state = parse_state(&args.input)?;
            let class = classify_state(&state, args.tol).map_err(|e| e.to_string())?;
            let report = is_block_positive(
                state.op(),
                state.dims(),
                args.tol,
                &BlockPositivitySearch::default(),
            )
            .map_err(|e| e.to_string())?;
            Ok((
                json!({
                    "class": class.to_string(),
                    "lambda_min": state.op().lambda_min(),
                    "block_positivity_min": report.min_value,
                }),
                args.output,
            ))
        }

        Command::Witness(WitnessCmd::Build { input, output }) => {
            let state = parse_state(&input)?;
            let w = build_witness(&state).map_err(|e| e.to_string())?;
            if w.margin() < 1e-9 {
                eprintln!(
                    "warning: witness margin {:.3e} is degenerate; detection may be unreliable",
                    w.margin()
                );
            }
            let value =
                serde_json::to_value(WitnessDto::from_witness(&w)).expect("witness serializes");
            Ok((value, output))
        }

        Command::Witness(WitnessCmd::Eval {
            witness,
            input,
            output,
        }) => {
            let w = parse_witness(&witness)?;
            let state = parse_state(&input)?;
            let value = witness_value(&w, &state).map_err(|e| e.to_string())?;
            Ok((
                json!({ "value": value, "alpha": w.alpha, "exceeds_alpha": value > w.alpha }),
                output,
            ))
        }

        Command::DiSimulate(args) => {
            let state = parse_state(&args.input)?;
            let povms_a = parse_povms(&args.povms_a)?;
            let povms_b = parse_povms(&args.povms_b)?;
            let sim =
                build_simulation(&state, &povms_a, &povms_b).map_err(|e| e.to_string())?;
            Ok((
                json!({
                    "sigma": serde_json::to_value(MatrixDto::from_state(&sim.sigma)).unwrap(),
                    "bob_povms": serde_json::to_value(PovmListDto::from_povms(&sim.bob_povms)).unwrap(),
                    "max_deviation": sim.max_deviation,
                    "rank": sim.rank,
                }),
                args.output,
            ))
        }

        Command::PauliScan(args) => {
            let state = parse_state(&args.input)?;
            let a_prime = a_pauli_prime(&state).map_err(|e| e.to_string())?;
            let method = match args.method {
                MethodArg::ClosedForm => ScanMethod::ClosedForm,
                MethodArg::Search => ScanMethod::DirectSearch,
            };
            let res = max_a_pauli(&state, method).map_err(|e| e.to_string())?;
            let t: Vec<Vec<f64>> = (0..3)
                .map(|c| (0..3).map(|d| res.correlation[(c, d)]).collect())
                .collect();
            Ok((
                json!({
                    "a_prime": a_prime,
                    "correlation": t,
                    "max_value": res.max_value,
                    "u_a": complex_matrix_value(&res.u_a),
                    "u_b": complex_matrix_value(&res.u_b),
                    "method": match res.method {
                        ScanMethod::ClosedForm => "closed-form",
                        ScanMethod::DirectSearch => "search",
                    },
                }),
                args.output,
            ))
        }

        Command::Protocol(ProtocolCmd::Run {
            state,
            witness,
            n,
            seed,
            visibility,
            trials,
            alpha,
            output,
        }) => {
            let rho = parse_state(&state)?;
            let w = parse_witness(&witness)?;
            let pairs = witness_observable_pairs(&w);
            let alpha = alpha.unwrap_or(w.alpha);
            let noise = visibility.map(|v| NoiseModel { visibility: v });
            if trials <= 1 {
                let report = run_protocol(&rho, &pairs, alpha, n, seed, noise)
                    .map_err(|e| e.to_string())?;
                Ok((
                    json!({
                        "n": report.n,
                        "m": report.m,
                        "empirical_mean": report.empirical_mean,
                        "std_error": report.std_error,
                        "alpha": report.alpha,
                        "decision": report.decision,
                        "seed": report.seed,
                    }),
                    output,
                ))
            } else {
                let report = detection_power(&rho, &pairs, alpha, n, trials, seed, noise)
                    .map_err(|e| e.to_string())?;
                Ok((
                    json!({
                        "power": report.power,
                        "trials": report.trials,
                        "n": report.n,
                        "alpha": report.alpha,
                        "seed": report.seed,
                    }),
                    output,
                ))
            }
        }

        Command::Gen(GenCmd::RhoMax { output }) => Ok((state_value(&rho_max()), output)),

        Command::Gen(GenCmd::Phi { dim, output }) => {
            let dims = BipartiteDims::new(dim, dim).map_err(|e| e.to_string())?;
            let state =
                BipartiteState::new(max_entangled(dim), dims).map_err(|e| e.to_string())?;
            Ok((state_value(&state), output))
        }

        Command::Gen(GenCmd::RandomBqPure { seed, output }) => {
            let state = random_beyond_quantum_pure(seed);
            let mut value = state_value(&state);
            value["seed"] = json!(seed);
            Ok((value, output))
        }

        Command::Gen(GenCmd::Depolarize {
            input,
            visibility,
            output,
        }) => {
            let state = parse_state(&input)?;
            let mixed = state.depolarize(visibility).map_err(|e| e.to_string())?;
            Ok((state_value(&mixed), output))
        }
    }
}
