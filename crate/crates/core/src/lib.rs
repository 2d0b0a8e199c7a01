//! Local monitorability of trace languages over distributed alphabets.
//!
//! The crate is organised bottom-up:
//!
//! * [`alphabet`], [`trace`] and [`tracker`] implement Mazurkiewicz traces over a
//!   distributed alphabet (letters located on sets of processes).
//! * [`omega`] holds sequential Büchi automata and DFAs together with the language
//!   level analyses everything else is built on (residual classification,
//!   complementation, safety and trace-closedness checks).
//! * [`async_automata`] models asynchronous automata and their acceptance over
//!   ultimately periodic runs.
//! * [`closure`], [`monitorability`] and [`synthesis`] are the prime-closure,
//!   decision and verdict-monitor layers.
//! * [`gamma`] deals with Γ-infinite traces and Muller to Büchi conversion.
//! * [`runtime`] simulates a distributed run with per-process causal views and
//!   attaches a verdict monitor; [`cli`] wires everything to the command line.

pub mod alphabet;
pub mod async_automata;
pub mod cli;
pub mod closure;
pub mod gamma;
mod graph;
pub mod monitorability;
pub mod omega;
pub mod runtime;
pub mod synthesis;
pub mod trace;
pub mod tracker;

pub use alphabet::{DistributedAlphabet, Letter, ProcSet, Process};
pub use trace::Trace;
pub use tracker::PrimalityTracker;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{what} exceeds cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("trace `{0}` is not prime")]
    NotPrime(String),
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("letters of automaton do not match the distributed alphabet")]
    AlphabetMismatch,
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
