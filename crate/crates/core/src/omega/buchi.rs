use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::text;
use crate::alphabet::{DistributedAlphabet, Letter};
use crate::graph;
use crate::{Error, Result};

/// A set of automaton states.
pub type StateSet = FixedBitSet;

/// Nondeterministic Büchi automaton. Letters are indexed positionally; when
/// the automaton is used together with a [`DistributedAlphabet`] its letter
/// list is aligned with the alphabet (see [`BuchiAutomaton::aligned`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    letters: Vec<String>,
    states: Vec<String>,
    initial: usize,
    accepting: FixedBitSet,
    delta: Vec<Vec<Vec<usize>>>,
}

impl BuchiAutomaton {
    /// Automaton with the given states, no transitions and no accepting states.
    pub fn new(letters: Vec<String>, states: Vec<String>, initial: usize) -> Self {
        let n = states.len();
        let k = letters.len();
        BuchiAutomaton {
            letters,
            states,
            initial,
            accepting: FixedBitSet::with_capacity(n),
            delta: vec![vec![Vec::new(); k]; n],
        }
    }

    /// Automaton accepting every ω-word over `letters`.
    pub fn universal(letters: Vec<String>) -> Self {
        let k = letters.len();
        let mut b = BuchiAutomaton::new(letters, vec!["u".into()], 0);
        b.set_accepting(0, true);
        for a in 0..k {
            b.add_transition(0, Letter(a), 0);
        }
        b
    }

    /// Automaton accepting nothing.
    pub fn empty(letters: Vec<String>) -> Self {
        BuchiAutomaton::new(letters, vec!["e".into()], 0)
    }

    pub fn parse(text: &str, letters: Option<&[String]>) -> Result<Self> {
        let raw = text::parse(text, letters)?;
        let mut b = BuchiAutomaton::new(raw.letters, raw.states, raw.initial);
        for q in raw.accepting {
            b.set_accepting(q, true);
        }
        for (p, a, q) in raw.trans {
            b.add_transition(p, Letter(a), q);
        }
        Ok(b)
    }

    /// Parses an automaton over the letters of `alph`.
    pub fn parse_for(alph: &DistributedAlphabet, text: &str) -> Result<Self> {
        Self::parse(text, Some(alph.letter_names()))
    }

    pub fn to_text(&self) -> String {
        let trans = (0..self.num_states()).flat_map(|p| {
            (0..self.num_letters())
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

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.accepting.grow(self.states.len());
        self.delta.push(vec![Vec::new(); self.letters.len()]);
        self.states.len() - 1
    }

    pub fn add_transition(&mut self, p: usize, a: Letter, q: usize) {
        let succ = &mut self.delta[p][a.0];
        if let Err(pos) = succ.binary_search(&q) {
            succ.insert(pos, q);
        }
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting.set(q, accepting);
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
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

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(q)
    }

    pub fn accepting(&self) -> &StateSet {
        &self.accepting
    }

    pub fn successors(&self, q: usize, a: Letter) -> &[usize] {
        &self.delta[q][a.0]
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    pub fn singleton(&self, q: usize) -> StateSet {
        let mut s = FixedBitSet::with_capacity(self.num_states());
        s.insert(q);
        s
    }

    pub fn initial_set(&self) -> StateSet {
        self.singleton(self.initial)
    }

    pub fn post(&self, set: &StateSet, a: Letter) -> StateSet {
        let mut out = FixedBitSet::with_capacity(self.num_states());
        for q in set.ones() {
            for &r in &self.delta[q][a.0] {
                out.insert(r);
            }
        }
        out
    }

    pub fn post_word(&self, set: &StateSet, word: &[Letter]) -> StateSet {
        word.iter().fold(set.clone(), |s, &a| self.post(&s, a))
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().flatten().all(|s| s.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().flatten().all(|s| !s.is_empty())
    }

    /// Adds a non-accepting sink if some transition is missing.
    pub fn completed(&self) -> BuchiAutomaton {
        if self.is_complete() {
            return self.clone();
        }
        let mut b = self.clone();
        let sink = b.add_state(fresh_name(&b.states, "sink"));
        for q in 0..b.num_states() {
            for a in 0..b.num_letters() {
                if b.delta[q][a].is_empty() {
                    b.delta[q][a].push(sink);
                }
            }
        }
        b
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|row| {
                let mut v: Vec<usize> = row.iter().flatten().copied().collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    pub fn reachable_states(&self) -> StateSet {
        let adj = self.adjacency();
        let mut seen = FixedBitSet::with_capacity(self.num_states());
        let mut stack = vec![self.initial];
        seen.insert(self.initial);
        while let Some(q) = stack.pop() {
            for &r in &adj[q] {
                if !seen.put(r) {
                    stack.push(r);
                }
            }
        }
        seen
    }

    /// States with a non-empty residual language.
    pub fn nonempty_states(&self) -> StateSet {
        let adj = self.adjacency();
        let acc: Vec<bool> = (0..self.num_states())
            .map(|q| self.is_accepting(q))
            .collect();
        let cyc = graph::accepting_cycle_nodes(&adj, &acc);
        let back = graph::backward_reach(&adj, &cyc);
        let mut s = FixedBitSet::with_capacity(self.num_states());
        for (q, b) in back.into_iter().enumerate() {
            if b {
                s.insert(q);
            }
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        !self.nonempty_states().contains(self.initial)
    }

    /// Restriction to reachable states with non-empty residual. The result
    /// keeps the initial state even when the language is empty.
    pub fn trimmed(&self) -> BuchiAutomaton {
        let mut keep = self.nonempty_states();
        keep.intersect_with(&self.reachable_states());
        keep.insert(self.initial);
        self.restrict(&keep)
    }

    pub(crate) fn restrict(&self, keep: &StateSet) -> BuchiAutomaton {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for q in keep.ones() {
            map[q] = names.len();
            names.push(self.states[q].clone());
        }
        let mut b = BuchiAutomaton::new(self.letters.clone(), names, map[self.initial]);
        for q in keep.ones() {
            b.set_accepting(map[q], self.is_accepting(q));
            for a in 0..self.num_letters() {
                for &r in &self.delta[q][a] {
                    if map[r] != usize::MAX {
                        b.add_transition(map[q], Letter(a), map[r]);
                    }
                }
            }
        }
        b
    }

    /// `u v^ω ∈ L(B)`, by an accepting-cycle search in the product of the
    /// automaton with the positions of `v`.
    pub fn accepts_lasso(&self, u: &[Letter], v: &[Letter]) -> Result<bool> {
        if v.is_empty() {
            return Err(Error::EmptyLoop);
        }
        let start = self.post_word(&self.initial_set(), u);
        let starts: Vec<(usize, usize)> = start.ones().map(|q| (q, 0)).collect();
        let n = v.len();
        Ok(graph::accepting_lasso_reachable(
            starts,
            |&(q, i)| {
                self.delta[q][v[i].0]
                    .iter()
                    .map(|&r| (r, (i + 1) % n))
                    .collect()
            },
            |&(q, _)| self.is_accepting(q),
        ))
    }

    /// Same automaton with its letters reordered to `letters` (which must be
    /// the same set).
    pub fn with_letters(&self, letters: &[String]) -> Result<BuchiAutomaton> {
        if letters.len() != self.letters.len() {
            return Err(Error::AlphabetMismatch);
        }
        let ix: HashMap<&str, usize> = self
            .letters
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let perm = letters
            .iter()
            .map(|l| ix.get(l.as_str()).copied().ok_or(Error::AlphabetMismatch))
            .collect::<Result<Vec<_>>>()?;
        let mut b = self.clone();
        b.letters = letters.to_vec();
        for q in 0..self.num_states() {
            b.delta[q] = perm.iter().map(|&old| self.delta[q][old].clone()).collect();
        }
        Ok(b)
    }

    /// Aligns the letter indices with `alph`.
    pub fn aligned(&self, alph: &DistributedAlphabet) -> Result<BuchiAutomaton> {
        self.with_letters(alph.letter_names())
    }

    pub fn same_letters(&self, other: &BuchiAutomaton) -> Result<()> {
        if self.letters == other.letters {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    /// Parses a word over the automaton's letters: whitespace-separated
    /// tokens, or runs of single-character letters; `-` is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "-" || tok == "ε" {
                continue;
            }
            if let Some(i) = self.letters.iter().position(|l| l == tok) {
                out.push(Letter(i));
                continue;
            }
            for ch in tok.chars() {
                let s = ch.to_string();
                let i = self
                    .letters
                    .iter()
                    .position(|l| *l == s)
                    .ok_or_else(|| Error::UnknownLetter(tok.to_string()))?;
                out.push(Letter(i));
            }
        }
        Ok(out)
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        format_word(&self.letters, word)
    }

    /// Union automaton. Two deterministic inputs give a deterministic
    /// product; otherwise a fresh initial state branches into both.
    pub fn union(&self, other: &BuchiAutomaton) -> Result<BuchiAutomaton> {
        self.same_letters(other)?;
        if self.is_deterministic() && other.is_deterministic() {
            let x = self.completed();
            let y = other.completed();
            return Ok(product(&x, &y, |x, p, y, q| {
                x.is_accepting(p) || y.is_accepting(q)
            }));
        }
        let n1 = self.num_states();
        let mut names: Vec<String> = vec!["init".into()];
        names.extend(self.states.iter().map(|s| format!("l.{s}")));
        names.extend(other.states.iter().map(|s| format!("r.{s}")));
        let mut b = BuchiAutomaton::new(self.letters.clone(), names, 0);
        for (off, src) in [(1, self), (1 + n1, other)] {
            for q in 0..src.num_states() {
                b.set_accepting(off + q, src.is_accepting(q));
                for a in src.letters() {
                    for &r in src.successors(q, a) {
                        b.add_transition(off + q, a, off + r);
                        if q == src.initial {
                            b.add_transition(0, a, off + r);
                        }
                    }
                }
            }
        }
        Ok(b)
    }

    /// Intersection via the two-phase product.
    pub fn intersect(&self, other: &BuchiAutomaton) -> Result<BuchiAutomaton> {
        self.same_letters(other)?;
        let k = self.num_letters();
        let start = (self.initial, other.initial, 0u8);
        let mut ids: HashMap<(usize, usize, u8), usize> = HashMap::new();
        let mut nodes = vec![start];
        ids.insert(start, 0);
        let mut edges = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (p, q, f) = nodes[i];
            let f2 = match f {
                0 if self.is_accepting(p) => 1,
                1 if other.is_accepting(q) => 0,
                f => f,
            };
            for a in 0..k {
                for &p2 in &self.delta[p][a] {
                    for &q2 in &other.delta[q][a] {
                        let node = (p2, q2, f2);
                        let id = *ids.entry(node).or_insert_with(|| {
                            nodes.push(node);
                            nodes.len() - 1
                        });
                        edges.push((i, a, id));
                    }
                }
            }
            i += 1;
        }
        let names = nodes
            .iter()
            .map(|(p, q, f)| format!("{}.{}.{}", self.states[*p], other.states[*q], f))
            .collect();
        let mut b = BuchiAutomaton::new(self.letters.clone(), names, 0);
        for (i, &(_, q, f)) in nodes.iter().enumerate() {
            b.set_accepting(i, f == 1 && other.is_accepting(q));
        }
        for (p, a, q) in edges {
            b.add_transition(p, Letter(a), q);
        }
        Ok(b)
    }
}

/// Reachable synchronous product of two complete automata with acceptance
/// given per pair.
pub(crate) fn product(
    x: &BuchiAutomaton,
    y: &BuchiAutomaton,
    acc: impl Fn(&BuchiAutomaton, usize, &BuchiAutomaton, usize) -> bool,
) -> BuchiAutomaton {
    let start = (x.initial, y.initial);
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    ids.insert(start, 0);
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (p, q) = nodes[i];
        for a in 0..x.num_letters() {
            for &p2 in &x.delta[p][a] {
                for &q2 in &y.delta[q][a] {
                    let id = *ids.entry((p2, q2)).or_insert_with(|| {
                        nodes.push((p2, q2));
                        nodes.len() - 1
                    });
                    edges.push((i, a, id));
                }
            }
        }
        i += 1;
    }
    let names = nodes
        .iter()
        .map(|(p, q)| format!("{}.{}", x.states[*p], y.states[*q]))
        .collect();
    let mut b = BuchiAutomaton::new(x.letters.clone(), names, 0);
    for (i, &(p, q)) in nodes.iter().enumerate() {
        b.set_accepting(i, acc(x, p, y, q));
    }
    for (p, a, q) in edges {
        b.add_transition(p, Letter(a), q);
    }
    b
}

pub(crate) fn fresh_name(existing: &[String], base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 0;
    while existing.contains(&name) {
        i += 1;
        name = format!("{base}{i}");
    }
    name
}

pub(crate) fn format_word(letters: &[String], word: &[Letter]) -> String {
    if word.is_empty() {
        return "-".into();
    }
    let single = letters.iter().all(|l| l.chars().count() == 1);
    let parts: Vec<&str> = word.iter().map(|a| letters[a.0].as_str()).collect();
    if single {
        parts.concat()
    } else {
        parts.join(" ")
    }
}
