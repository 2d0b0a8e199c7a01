//! Safety and trace-closedness tests on Büchi automata.

use std::collections::HashMap;

use super::buchi::{BuchiAutomaton, StateSet};
use super::complement::complement;
use crate::alphabet::{DistributedAlphabet, Letter};
use crate::{Error, Result};

/// `L(B)` equals its limit closure.
pub fn is_safety(b: &BuchiAutomaton) -> Result<bool> {
    let mut closure = b.trimmed();
    for q in 0..closure.num_states() {
        closure.set_accepting(q, true);
    }
    if b.is_empty() {
        return Ok(true);
    }
    let c = complement(b)?;
    Ok(closure.intersect(&c)?.is_empty())
}

/// `swap(L(B)) ⊆ L(B)` where `swap` exchanges one adjacent pair of
/// independent letters at some finite position. `b` must be aligned with
/// `alph`.
pub fn swap_closed_check(alph: &DistributedAlphabet, b: &BuchiAutomaton) -> Result<bool> {
    if b.letter_names() != alph.letter_names() {
        return Err(Error::AlphabetMismatch);
    }
    let swapped = swap_automaton(alph, b);
    let c = complement(b)?;
    Ok(swapped.intersect(&c)?.is_empty())
}

/// Accepts the words `u b a w` with `u a b w ∈ L(B)` and `a I b`.
fn swap_automaton(alph: &DistributedAlphabet, b: &BuchiAutomaton) -> BuchiAutomaton {
    let n = b.num_states();
    let k = b.num_letters();
    // 0..n: before the swap; n + q*k + x: read x first, owes the letter
    // before it; (n + n*k)..: after the swap.
    let after = n + n * k;
    let mut names: Vec<String> = b.state_names().iter().map(|s| format!("{s}.0")).collect();
    for q in 0..n {
        for x in 0..k {
            names.push(format!("{}.{}", b.state_name(q), b.letter_names()[x]));
        }
    }
    names.extend(b.state_names().iter().map(|s| format!("{s}.1")));
    let mut s = BuchiAutomaton::new(b.letter_names().to_vec(), names, b.initial());
    for q in 0..n {
        s.set_accepting(after + q, b.is_accepting(q));
        for a in b.letters() {
            for &r in b.successors(q, a) {
                s.add_transition(q, a, r);
                s.add_transition(after + q, a, after + r);
            }
            // Read `x` now, the word of B has `a x` here.
            for x in b.letters() {
                if x == a || !alph.independent(a, x) {
                    continue;
                }
                s.add_transition(q, x, n + q * k + x.0);
                for &r in b.successors(q, a) {
                    for &t in b.successors(r, x) {
                        s.add_transition(n + q * k + x.0, a, after + t);
                    }
                }
            }
        }
    }
    s.trimmed()
}

/// Exhaustive finite check: membership in the prefix set of `L(B)` is
/// invariant under adjacent independent swaps for all words up to
/// `max_len`. Returns a violating pair if any.
pub fn prefix_swap_check(
    alph: &DistributedAlphabet,
    b: &BuchiAutomaton,
    max_len: usize,
) -> Option<(Vec<Letter>, Vec<Letter>)> {
    let nonempty = b.nonempty_states();
    let mut memo: HashMap<Vec<Letter>, bool> = HashMap::new();
    let mut in_prefixes = |w: &[Letter]| -> bool {
        if let Some(&r) = memo.get(w) {
            return r;
        }
        let s: StateSet = b.post_word(&b.initial_set(), w);
        let r = !s.is_disjoint(&nonempty);
        memo.insert(w.to_vec(), r);
        r
    };
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alph.letters() {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        for w in &next {
            let m = in_prefixes(w);
            for i in 0..w.len().saturating_sub(1) {
                if w[i] != w[i + 1] && alph.independent(w[i], w[i + 1]) {
                    let mut v = w.clone();
                    v.swap(i, i + 1);
                    if in_prefixes(&v) != m {
                        return Some((w.clone(), v));
                    }
                }
            }
        }
        layer = next;
    }
    None
}

/// How thoroughly [`validate_trace_closed`] checks its input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValidationMode {
    /// Swap closure of the ω-language and the finite prefix check.
    #[default]
    Full,
    /// Only the finite prefix check.
    PrefixOnly,
    Skip,
}

/// Necessary check that `L(B)` is trace-closed.
pub fn validate_trace_closed(
    alph: &DistributedAlphabet,
    b: &BuchiAutomaton,
    mode: ValidationMode,
) -> Result<()> {
    if mode == ValidationMode::Skip {
        return Ok(());
    }
    // Keep the exhaustive prefix check within a few thousand words.
    let k = alph.num_letters().max(2);
    let mut len = 6;
    while len > 2 && k.pow(len as u32) > 50_000 {
        len -= 1;
    }
    if let Some((u, v)) = prefix_swap_check(alph, b, len) {
        return Err(Error::Validation(format!(
            "language is not trace-closed: prefix `{}` and its swap `{}` disagree",
            alph.format_word(&u),
            alph.format_word(&v)
        )));
    }
    if mode == ValidationMode::Full && !swap_closed_check(alph, b)? {
        return Err(Error::Validation(
            "language is not closed under swapping independent letters".into(),
        ));
    }
    Ok(())
}
