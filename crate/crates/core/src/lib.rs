//! Detection toolkit for beyond-quantum bipartite states.
//!
//! Entanglement structures with local quantum subsystems admit global states
//! that are block positive but not positive semi-definite. This crate
//! classifies states against the cone chain SEP in C in SEP*, constructs the
//! standard-quantum simulation that makes device-independent detection
//! impossible, builds device-dependent witnesses from local observables,
//! evaluates and maximizes the two-qubit Pauli correlation functional, and
//! Monte-Carlo-simulates the resulting bipartite detection protocol.
//!
//! ```
//! use beyondq::cones::{classify_state, rho_max, StateClass};
//! use beyondq::pauli::{max_a_pauli, ScanMethod};
//! use beyondq::witness::build_witness;
//!
//! // half the swap operator: block positive, not PSD
//! let state = rho_max();
//! assert_eq!(classify_state(&state, 1e-10).unwrap(), StateClass::BeyondQuantum);
//!
//! // its same-axis Pauli correlation sum reaches 3; quantum states stop at 1
//! let scan = max_a_pauli(&state, ScanMethod::ClosedForm).unwrap();
//! assert!((scan.max_value - 3.0).abs() < 1e-12);
//!
//! // the witness that certifies it with local observables
//! let witness = build_witness(&state).unwrap();
//! assert!((witness.alpha - 0.5).abs() < 1e-12);
//! assert!((witness.target_value - 1.0).abs() < 1e-12);
//! ```

pub mod cones;
pub mod di;
pub mod error;
pub mod herm;
pub mod json;
pub mod pauli;
pub mod protocol;
pub mod random;
pub mod schmidt;
pub mod state;
pub mod witness;

pub use error::{Error, Result};
pub use herm::{BipartiteDims, HermitianOperator, Side};
pub use state::BipartiteState;
