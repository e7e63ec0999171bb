//! Exact simulator and security analyzer for delayed-choice relativistic
//! quantum bit commitment.
//!
//! * [`quantum`]: Bell states, Paulis, measurements on small registers.
//! * [`spacetime`]: actor geometry, canonical timetables, light-cone audit.
//! * [`protocol`]: single-party, multiparty and string schemes with reveal checks.
//! * [`adversary`]: cheating strategies and exact security figures.
//! * [`harness`]: seeded Monte Carlo, run configuration, transcript JSON.

pub mod adversary;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod quantum;
pub mod spacetime;

pub use error::{Error, Result};
pub use protocol::{
    committed_bit, run_multiparty, run_single, run_string, validate_multiparty, validate_single,
    validate_string, RunMode, SchemeParams, Transcript, ValidationMode, Verdict,
};
pub use quantum::{BasisStateSpec, BellLabel, PauliOp, StateVector};
pub use spacetime::Scheme;
