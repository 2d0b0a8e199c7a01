//! Sequential ω-word and finite-word automata and the language-level analyses
//! used by the trace layers.

mod buchi;
mod checks;
mod complement;
mod dfa;
mod residual;
mod text;

pub(crate) use buchi::{format_word as format_letters, fresh_name as fresh_state_name};
pub use buchi::{BuchiAutomaton, StateSet};
pub use checks::{
    is_safety, prefix_swap_check, swap_closed_check, validate_trace_closed, ValidationMode,
};
pub use complement::{complement, complement_with_cap, DEFAULT_COMPLEMENT_CAP};
pub use dfa::{Dfa, Nfa};
pub use residual::{residual_class, ResidualClass, ResidualOracle, DEFAULT_MONOID_CAP};
