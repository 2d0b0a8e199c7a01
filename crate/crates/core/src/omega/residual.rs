//! Classification of residual languages `L(B, P)` into empty, universal or
//! neither.
//!
//! Universality is decided exactly with transition profiles: for a finite
//! word `w`, `reach[q]` is the set of states reachable from `q` on `w` and
//! `acc[q]` those reachable through an accepting state. `L(B, P)` is
//! universal iff for every subset `S` reachable from `P` and every
//! idempotent profile `e`, `S` meets `Good(e) = {q : ∃ q' ∈ e.reach[q],
//! q' ∈ e.acc[q']}`.

use std::collections::{HashMap, HashSet, VecDeque};

use super::buchi::{BuchiAutomaton, StateSet};
use crate::alphabet::Letter;
use crate::{Error, Result};

pub const DEFAULT_MONOID_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidualClass {
    Empty,
    Universal,
    Other,
}

impl ResidualClass {
    /// Empty or universal.
    pub fn is_good(self) -> bool {
        self != ResidualClass::Other
    }
}

/// Memoizing residual classifier for one automaton.
#[derive(Clone, Debug)]
pub struct ResidualOracle {
    b: BuchiAutomaton,
    nonempty: StateSet,
    deterministic: bool,
    memo: HashMap<StateSet, ResidualClass>,
    goods: Option<Vec<u64>>,
    monoid_cap: usize,
}

impl ResidualOracle {
    pub fn new(b: &BuchiAutomaton) -> Self {
        Self::with_cap(b, DEFAULT_MONOID_CAP)
    }

    pub fn with_cap(b: &BuchiAutomaton, monoid_cap: usize) -> Self {
        ResidualOracle {
            b: b.clone(),
            nonempty: b.nonempty_states(),
            deterministic: b.is_deterministic(),
            memo: HashMap::new(),
            goods: None,
            monoid_cap,
        }
    }

    pub fn automaton(&self) -> &BuchiAutomaton {
        &self.b
    }

    pub fn is_empty(&self, set: &StateSet) -> bool {
        self.nonempty.is_disjoint(set)
    }

    pub fn classify(&mut self, set: &StateSet) -> Result<ResidualClass> {
        if let Some(&c) = self.memo.get(set) {
            return Ok(c);
        }
        let c = if self.is_empty(set) || self.b.num_letters() == 0 {
            ResidualClass::Empty
        } else if self.is_universal(set)? {
            ResidualClass::Universal
        } else {
            ResidualClass::Other
        };
        self.memo.insert(set.clone(), c);
        Ok(c)
    }

    fn is_universal(&mut self, set: &StateSet) -> Result<bool> {
        if self.deterministic && set.count_ones(..) == 1 {
            let q = set.ones().next().expect("singleton");
            return Ok(deterministic_universal(&self.b, q));
        }
        let n = self.b.num_states();
        if n > 64 {
            return Err(Error::CapExceeded {
                what: "states for universality check",
                cap: 64,
            });
        }
        if self.goods.is_none() {
            self.goods = Some(good_sets(&self.b, self.monoid_cap)?);
        }
        let goods = self.goods.as_ref().expect("computed");
        let start = to_mask(set);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start);
        while let Some(s) = queue.pop_front() {
            if goods.iter().any(|&g| g & s == 0) {
                return Ok(false);
            }
            for a in self.b.letters() {
                let t = post_mask(&self.b, s, a);
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        Ok(true)
    }
}

/// One-shot classification.
pub fn residual_class(b: &BuchiAutomaton, set: &StateSet) -> Result<ResidualClass> {
    ResidualOracle::new(b).classify(set)
}

/// From a single state of a deterministic automaton: universal iff every
/// reachable state has all successors and no cycle avoids accepting states.
fn deterministic_universal(b: &BuchiAutomaton, q: usize) -> bool {
    let mut seen = vec![false; b.num_states()];
    let mut stack = vec![q];
    seen[q] = true;
    while let Some(p) = stack.pop() {
        for a in b.letters() {
            match b.successors(p, a).first() {
                None => return false,
                Some(&r) => {
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..b.num_states())
        .map(|p| {
            if seen[p] && !b.is_accepting(p) {
                b.letters()
                    .flat_map(|a| b.successors(p, a).iter().copied())
                    .filter(|&r| !b.is_accepting(r))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    !crate::graph::cyclic_nodes(&adj)
        .into_iter()
        .enumerate()
        .any(|(p, c)| c && seen[p] && !b.is_accepting(p))
}

fn to_mask(set: &StateSet) -> u64 {
    set.ones().fold(0, |m, q| m | (1 << q))
}

fn post_mask(b: &BuchiAutomaton, s: u64, a: Letter) -> u64 {
    let mut out = 0u64;
    let mut rest = s;
    while rest != 0 {
        let q = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        for &r in b.successors(q, a) {
            out |= 1 << r;
        }
    }
    out
}

/// A transition profile: `reach` rows followed by `acc` rows.
type Profile = Vec<u64>;

fn letter_profile(b: &BuchiAutomaton, a: Letter) -> Profile {
    let n = b.num_states();
    let f = to_mask(b.accepting());
    let mut p = vec![0u64; 2 * n];
    for q in 0..n {
        let succ = b.successors(q, a).iter().fold(0u64, |m, &r| m | (1 << r));
        p[q] = succ;
        p[n + q] = if b.is_accepting(q) { succ } else { succ & f };
    }
    p
}

fn compose(x: &Profile, y: &Profile, n: usize) -> Profile {
    let mut out = vec![0u64; 2 * n];
    for q in 0..n {
        let mut reach = 0u64;
        let mut acc = 0u64;
        let mut xr = x[q];
        while xr != 0 {
            let m = xr.trailing_zeros() as usize;
            xr &= xr - 1;
            reach |= y[m];
            acc |= y[n + m];
        }
        let mut xa = x[n + q];
        while xa != 0 {
            let m = xa.trailing_zeros() as usize;
            xa &= xa - 1;
            acc |= y[m];
        }
        out[q] = reach;
        out[n + q] = acc;
    }
    out
}

/// Minimal `Good(e)` sets over all idempotent profiles `e`.
fn good_sets(b: &BuchiAutomaton, cap: usize) -> Result<Vec<u64>> {
    let n = b.num_states();
    let gens: Vec<Profile> = b.letters().map(|a| letter_profile(b, a)).collect();
    let mut seen: HashSet<Profile> = HashSet::new();
    let mut queue: VecDeque<Profile> = VecDeque::new();
    for g in &gens {
        if seen.insert(g.clone()) {
            queue.push_back(g.clone());
        }
    }
    let mut goods: Vec<u64> = Vec::new();
    while let Some(e) = queue.pop_front() {
        if compose(&e, &e, n) == e {
            let mut good = 0u64;
            for q in 0..n {
                let mut r = e[q];
                while r != 0 {
                    let m = r.trailing_zeros() as usize;
                    r &= r - 1;
                    if e[n + m] & (1 << m) != 0 {
                        good |= 1 << q;
                        break;
                    }
                }
            }
            if !goods.iter().any(|&g| g & !good == 0) {
                goods.retain(|&g| good & !g != 0);
                goods.push(good);
            }
        }
        for g in &gens {
            let next = compose(&e, g, n);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded {
                        what: "transition profiles",
                        cap,
                    });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    goods.sort_unstable();
    Ok(goods)
}
