//! Finite-word automata.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::buchi::format_word;
use super::text;
use crate::alphabet::{DistributedAlphabet, Letter};
use crate::{Error, Result};

/// Nondeterministic finite automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    letters: Vec<String>,
    states: Vec<String>,
    initial: usize,
    accepting: FixedBitSet,
    delta: Vec<Vec<Vec<usize>>>,
}

impl Nfa {
    pub fn new(letters: Vec<String>, states: Vec<String>, initial: usize) -> Self {
        let n = states.len();
        let k = letters.len();
        Nfa {
            letters,
            states,
            initial,
            accepting: FixedBitSet::with_capacity(n),
            delta: vec![vec![Vec::new(); k]; n],
        }
    }

    pub fn parse(text: &str, letters: Option<&[String]>) -> Result<Self> {
        let raw = text::parse(text, letters)?;
        let mut a = Nfa::new(raw.letters, raw.states, raw.initial);
        for q in raw.accepting {
            a.set_accepting(q, true);
        }
        for (p, l, q) in raw.trans {
            a.add_transition(p, Letter(l), q);
        }
        Ok(a)
    }

    pub fn to_text(&self) -> String {
        let trans = (0..self.num_states()).flat_map(|p| {
            (0..self.letters.len())
                .flat_map(move |a| self.delta[p][a].iter().map(move |&q| (p, a, q)))
        });
        text::write(
            &self.letters,
            &self.states,
            self.initial,
            self.accepting.ones(),
            trans,
        )
    }

    pub fn add_transition(&mut self, p: usize, a: Letter, q: usize) {
        let succ = &mut self.delta[p][a.0];
        if let Err(pos) = succ.binary_search(&q) {
            succ.insert(pos, q);
        }
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting.set(q, accepting);
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letters
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letters.len()).map(Letter)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(q)
    }

    pub fn successors(&self, q: usize, a: Letter) -> &[usize] {
        &self.delta[q][a.0]
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().flatten().all(|s| !s.is_empty())
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut cur = FixedBitSet::with_capacity(self.num_states());
        cur.insert(self.initial);
        for &a in word {
            let mut next = FixedBitSet::with_capacity(self.num_states());
            for q in cur.ones() {
                for &r in &self.delta[q][a.0] {
                    next.insert(r);
                }
            }
            cur = next;
        }
        cur.ones().any(|q| self.is_accepting(q))
    }

    /// Whether every finite word is accepted, by subset construction. On
    /// failure returns a shortest rejected word.
    pub fn universality(&self) -> std::result::Result<(), Vec<Letter>> {
        let mut start = FixedBitSet::with_capacity(self.num_states());
        start.insert(self.initial);
        let mut parent: HashMap<FixedBitSet, Option<(FixedBitSet, Letter)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            if !s.ones().any(|q| self.is_accepting(q)) {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some(Some((prev, a))) = parent.get(&cur) {
                    word.push(*a);
                    cur = prev.clone();
                }
                word.reverse();
                return Err(word);
            }
            for a in self.letters() {
                let mut t = FixedBitSet::with_capacity(self.num_states());
                for q in s.ones() {
                    for &r in &self.delta[q][a.0] {
                        t.insert(r);
                    }
                }
                if !parent.contains_key(&t) {
                    parent.insert(t.clone(), Some((s.clone(), a)));
                    queue.push_back(t);
                }
            }
        }
        Ok(())
    }

    pub fn is_universal(&self) -> bool {
        self.universality().is_ok()
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        format_word(&self.letters, word)
    }
}

/// Deterministic finite automaton with a partial transition map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    letters: Vec<String>,
    states: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn new(letters: Vec<String>, states: Vec<String>, initial: usize) -> Self {
        let n = states.len();
        let k = letters.len();
        Dfa {
            letters,
            states,
            initial,
            accepting: vec![false; n],
            delta: vec![vec![None; k]; n],
        }
    }

    /// Parses a DFA; a state with two successors on one letter is an error.
    pub fn parse(text: &str, letters: Option<&[String]>) -> Result<Self> {
        let raw = text::parse(text, letters)?;
        let mut d = Dfa::new(raw.letters, raw.states, raw.initial);
        for q in raw.accepting {
            d.accepting[q] = true;
        }
        for (p, a, q) in raw.trans {
            match d.delta[p][a] {
                Some(r) if r != q => {
                    return Err(Error::NotDeterministic(format!(
                        "state `{}` has two successors on `{}`",
                        d.states[p], d.letters[a]
                    )))
                }
                _ => d.delta[p][a] = Some(q),
            }
        }
        Ok(d)
    }

    pub fn parse_for(alph: &DistributedAlphabet, text: &str) -> Result<Self> {
        Self::parse(text, Some(alph.letter_names()))
    }

    pub fn to_text(&self) -> String {
        let trans = (0..self.num_states()).flat_map(|p| {
            (0..self.letters.len()).filter_map(move |a| self.delta[p][a].map(|q| (p, a, q)))
        });
        let acc = (0..self.num_states()).filter(|&q| self.accepting[q]);
        text::write(&self.letters, &self.states, self.initial, acc, trans)
    }

    pub fn set_transition(&mut self, p: usize, a: Letter, q: usize) {
        self.delta[p][a.0] = Some(q);
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letters.len()).map(Letter)
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letters
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, a: Letter) -> Option<usize> {
        self.delta[q][a.0]
    }

    pub fn run(&self, word: &[Letter]) -> Option<usize> {
        word.iter()
            .try_fold(self.initial, |q, &a| self.delta[q][a.0])
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.run(word).is_some_and(|q| self.accepting[q])
    }

    /// Removes states that are unreachable or cannot reach an accepting
    /// state. The initial state is kept even when it is dead.
    pub fn trimmed(&self) -> Dfa {
        let n = self.num_states();
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for r in self.delta[q].iter().flatten() {
                if !reach[*r] {
                    reach[*r] = true;
                    stack.push(*r);
                }
            }
        }
        let mut live = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if !live[q] && self.delta[q].iter().flatten().any(|&r| live[r]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        let keep: Vec<bool> = (0..n)
            .map(|q| q == self.initial || (reach[q] && live[q]))
            .collect();
        let mut map = vec![usize::MAX; n];
        let mut names = Vec::new();
        for q in (0..n).filter(|&q| keep[q]) {
            map[q] = names.len();
            names.push(self.states[q].clone());
        }
        let mut d = Dfa::new(self.letters.clone(), names, map[self.initial]);
        for q in (0..n).filter(|&q| keep[q]) {
            d.accepting[map[q]] = self.accepting[q];
            for a in 0..self.letters.len() {
                if let Some(r) = self.delta[q][a] {
                    if keep[r] && (live[r]) {
                        d.delta[map[q]][a] = Some(map[r]);
                    }
                }
            }
        }
        d
    }

    /// On the trimmed automaton: every state is accepting. The empty
    /// language counts as prefix-closed.
    pub fn is_prefix_closed(&self) -> bool {
        let t = self.trimmed();
        let live_initial = t.accepting[t.initial] || t.delta[t.initial].iter().any(Option::is_some);
        !live_initial || t.accepting.iter().all(|&b| b)
    }

    /// First violation of the forward diamond condition on the trimmed
    /// automaton: a word `u` and independent letters `a`, `b` with `ua` and
    /// `ub` extendable but `uab` not.
    pub fn forward_diamond_violation(
        &self,
        alph: &DistributedAlphabet,
    ) -> Option<(Vec<Letter>, Letter, Letter)> {
        let t = self.trimmed();
        let n = t.num_states();
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; n];
        path[t.initial] = Some(Vec::new());
        let mut queue = VecDeque::from([t.initial]);
        while let Some(q) = queue.pop_front() {
            let u = path[q].clone().expect("visited");
            for a in alph.letters() {
                for b in alph.letters() {
                    if a == b || !alph.independent(a, b) {
                        continue;
                    }
                    if let (Some(qa), Some(_)) = (t.delta[q][a.0], t.delta[q][b.0]) {
                        if t.delta[qa][b.0].is_none() {
                            return Some((u, a, b));
                        }
                    }
                }
            }
            for a in t.letters() {
                if let Some(r) = t.delta[q][a.0] {
                    if path[r].is_none() {
                        let mut v = u.clone();
                        v.push(a);
                        path[r] = Some(v);
                        queue.push_back(r);
                    }
                }
            }
        }
        None
    }

    pub fn has_forward_diamond(&self, alph: &DistributedAlphabet) -> bool {
        self.forward_diamond_violation(alph).is_none()
    }

    /// Minimal complete DFA (Moore partition refinement).
    pub fn minimized(&self) -> Dfa {
        let t = self.trimmed();
        let n = t.num_states();
        let k = t.letters.len();
        // Complete with a sink at index n.
        let total = n + 1;
        let succ = |q: usize, a: usize| -> usize {
            if q == n {
                n
            } else {
                t.delta[q][a].unwrap_or(n)
            }
        };
        let mut class: Vec<usize> = (0..total)
            .map(|q| usize::from(q < n && t.accepting[q]))
            .collect();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let new: Vec<usize> = (0..total)
                .map(|q| {
                    let sig = (class[q], (0..k).map(|a| class[succ(q, a)]).collect());
                    let next = sig_ids.len();
                    *sig_ids.entry(sig).or_insert(next)
                })
                .collect();
            let stable =
                sig_ids.len() == class.iter().collect::<std::collections::HashSet<_>>().len();
            class = new;
            if stable {
                break;
            }
        }
        let nclass = class.iter().max().map_or(0, |m| m + 1);
        let names = (0..nclass).map(|i| format!("m{i}")).collect();
        let mut d = Dfa::new(t.letters.clone(), names, class[t.initial]);
        for q in 0..total {
            d.accepting[class[q]] = q < n && t.accepting[q];
            for a in 0..k {
                d.delta[class[q]][a] = Some(class[succ(q, a)]);
            }
        }
        d
    }

    /// Finite-word trace-closedness on the minimal DFA: `δ(q, ab) = δ(q, ba)`
    /// for all reachable `q` and independent `a, b`. Returns a violating
    /// pair of words if any.
    pub fn trace_closed_violation(
        &self,
        alph: &DistributedAlphabet,
    ) -> Option<(Vec<Letter>, Vec<Letter>)> {
        let m = self.minimized();
        let n = m.num_states();
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; n];
        path[m.initial] = Some(Vec::new());
        let mut queue = VecDeque::from([m.initial]);
        while let Some(q) = queue.pop_front() {
            let u = path[q].clone().expect("visited");
            for a in alph.letters() {
                for b in alph.letters() {
                    if a < b && alph.independent(a, b) {
                        let ab = m.delta[q][a.0].and_then(|r| m.delta[r][b.0]);
                        let ba = m.delta[q][b.0].and_then(|r| m.delta[r][a.0]);
                        if ab != ba {
                            let mut x = u.clone();
                            x.extend([a, b]);
                            let mut y = u.clone();
                            y.extend([b, a]);
                            return Some((x, y));
                        }
                    }
                }
            }
            for a in m.letters() {
                if let Some(r) = m.delta[q][a.0] {
                    if path[r].is_none() {
                        let mut v = u.clone();
                        v.push(a);
                        path[r] = Some(v);
                        queue.push_back(r);
                    }
                }
            }
        }
        None
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        format_word(&self.letters, word)
    }
}
