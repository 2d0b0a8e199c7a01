//! Prime prefixes, prime closure and the locally-safety classification.

use std::collections::HashMap;

use crate::alphabet::{DistributedAlphabet, Letter, ProcSet};
use crate::omega::{is_safety, BuchiAutomaton, Dfa, StateSet};
use crate::trace::Trace;
use crate::{Error, Result};

/// Indexing of the view family: the union closure of the action domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewIndex {
    family: Vec<ProcSet>,
    dom_ix: Vec<usize>,
    /// `source[a][w]`: index of `W ∪ dom(a)` when `W` meets `dom(a)`.
    source: Vec<Vec<Option<usize>>>,
}

impl ViewIndex {
    pub fn new(alph: &DistributedAlphabet) -> Self {
        let family = alph.domain_family();
        let ix: HashMap<ProcSet, usize> = family.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let dom_ix = alph.letters().map(|a| ix[&alph.dom(a)]).collect();
        let source = alph
            .letters()
            .map(|a| {
                let d = alph.dom(a);
                family
                    .iter()
                    .map(|w| w.intersects(d).then(|| ix[&w.union(d)]))
                    .collect()
            })
            .collect();
        ViewIndex {
            family,
            dom_ix,
            source,
        }
    }

    pub fn family(&self) -> &[ProcSet] {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn index_of(&self, w: ProcSet) -> Option<usize> {
        self.family.iter().position(|&x| x == w)
    }

    /// Index of `dom(a)`.
    pub fn dom_index(&self, a: Letter) -> usize {
        self.dom_ix[a.0]
    }

    /// Entry the new value of `W` is computed from on `a`, if `W` changes.
    pub fn source(&self, a: Letter, w: usize) -> Option<usize> {
        self.source[a.0][w]
    }

    /// Generic view-map update: entries meeting `dom(a)` become
    /// `f(old[W ∪ dom(a)])`; `f` is evaluated once per distinct source.
    pub fn update<T: Clone>(&self, old: &[T], a: Letter, mut f: impl FnMut(&T) -> T) -> Vec<T> {
        let mut cache: HashMap<usize, T> = HashMap::new();
        (0..self.len())
            .map(|w| match self.source(a, w) {
                None => old[w].clone(),
                Some(src) => cache.entry(src).or_insert_with(|| f(&old[src])).clone(),
            })
            .collect()
    }
}

/// `p ∈ P(L(B))` for a prime trace `p`: the subset reached on its normal
/// form has a non-empty residual.
pub fn in_prime_set(b: &BuchiAutomaton, p: &Trace) -> Result<bool> {
    if !p.is_prime() {
        return Err(Error::NotPrime(format!("{:?}", p.normal_form())));
    }
    Ok(nonempty_after(b, &b.nonempty_states(), p.normal_form()))
}

fn nonempty_after(b: &BuchiAutomaton, nonempty: &StateSet, word: &[Letter]) -> bool {
    !b.post_word(&b.initial_set(), word).is_disjoint(nonempty)
}

/// Smallest prime prefix of `t` outside `P(L(B))`, if any.
pub fn closure_failure(b: &BuchiAutomaton, t: &Trace) -> Option<Trace> {
    let nonempty = b.nonempty_states();
    t.prime_prefixes()
        .into_iter()
        .find(|p| !nonempty_after(b, &nonempty, p.normal_form()))
}

/// `t` lies in the prime closure of `L(B)`: all its prime prefixes are in
/// `P(L(B))`.
pub fn in_closure(b: &BuchiAutomaton, t: &Trace) -> bool {
    closure_failure(b, t).is_none()
}

/// Deterministic sequential recognizer of the prime closure on finite
/// words. A state maps each view of the family to the subset of Büchi
/// states reached on that view; a step is refused when the new event's
/// past leaves `P(L)`. States and transitions are materialized on demand.
#[derive(Clone, Debug)]
pub struct ViewMapAutomaton {
    alph: DistributedAlphabet,
    b: BuchiAutomaton,
    nonempty: StateSet,
    index: ViewIndex,
    ids: HashMap<Vec<StateSet>, usize>,
    states: Vec<Vec<StateSet>>,
    trans: Vec<Vec<Option<Option<usize>>>>,
    cap: usize,
}

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

impl ViewMapAutomaton {
    /// `b` must be aligned with `alph`.
    pub fn new(b: &BuchiAutomaton, alph: &DistributedAlphabet) -> Result<Self> {
        if b.letter_names() != alph.letter_names() {
            return Err(Error::AlphabetMismatch);
        }
        let index = ViewIndex::new(alph);
        let init = vec![b.initial_set(); index.len()];
        let mut ids = HashMap::new();
        ids.insert(init.clone(), 0);
        Ok(ViewMapAutomaton {
            alph: alph.clone(),
            b: b.clone(),
            nonempty: b.nonempty_states(),
            index,
            ids,
            states: vec![init],
            trans: vec![vec![None; alph.num_letters()]],
            cap: DEFAULT_STATE_CAP,
        })
    }

    pub fn index(&self) -> &ViewIndex {
        &self.index
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn num_materialized(&self) -> usize {
        self.states.len()
    }

    pub fn entry(&self, state: usize, w: usize) -> &StateSet {
        &self.states[state][w]
    }

    /// Successor of `state` on `a`, or `None` if the step is refused.
    pub fn step(&mut self, state: usize, a: Letter) -> Result<Option<usize>> {
        if let Some(r) = self.trans[state][a.0] {
            return Ok(r);
        }
        let old = self.states[state].clone();
        let new = self.index.update(&old, a, |s| self.b.post(s, a));
        let permitted = !new[self.index.dom_index(a)].is_disjoint(&self.nonempty);
        let r = if permitted {
            Some(match self.ids.get(&new) {
                Some(&id) => id,
                None => {
                    if self.states.len() >= self.cap {
                        return Err(Error::CapExceeded {
                            what: "closure recognizer states",
                            cap: self.cap,
                        });
                    }
                    let id = self.states.len();
                    self.ids.insert(new.clone(), id);
                    self.states.push(new);
                    self.trans.push(vec![None; self.alph.num_letters()]);
                    id
                }
            })
        } else {
            None
        };
        self.trans[state][a.0] = Some(r);
        Ok(r)
    }

    /// Runs `word`; `None` if some step is refused.
    pub fn run(&mut self, word: &[Letter]) -> Result<Option<usize>> {
        let mut s = self.initial();
        for &a in word {
            match self.step(s, a)? {
                Some(t) => s = t,
                None => return Ok(None),
            }
        }
        Ok(Some(s))
    }

    /// `[word]` belongs to the prime closure.
    pub fn accepts(&mut self, word: &[Letter]) -> Result<bool> {
        Ok(self.run(word)?.is_some())
    }
}

/// Builds the closure recognizer for `L(B)` over `alph`.
pub fn build_closure_recognizer(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
) -> Result<ViewMapAutomaton> {
    ViewMapAutomaton::new(b, alph)
}

/// Outcome of [`classify_locally_safety`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyReport {
    pub prefix_closed: bool,
    pub forward_diamond: bool,
    /// Word `u` and letters `a`, `b` where the forward diamond fails.
    pub diamond_violation: Option<(Vec<Letter>, Letter, Letter)>,
    pub omega_safety: Option<bool>,
    pub locally_safety: bool,
}

impl SafetyReport {
    pub fn render(&self, alph: &DistributedAlphabet) -> String {
        let mut out = format!(
            "prefix_closed={} forward_diamond={}",
            self.prefix_closed, self.forward_diamond
        );
        if let Some((u, a, b)) = &self.diamond_violation {
            out.push_str(&format!(
                " diamond_failure={}:{},{}",
                alph.format_word(u),
                alph.letter_name(*a),
                alph.letter_name(*b)
            ));
        }
        if let Some(s) = self.omega_safety {
            out.push_str(&format!(" omega_safety={s}"));
        }
        out.push_str(&format!(" locally_safety={}", self.locally_safety));
        out
    }
}

/// Checks that the finite-word language of `dfa` (trace-closed) is
/// prefix-closed and satisfies the forward diamond condition, and, when
/// given, that the ω-part is a safety language.
pub fn classify_locally_safety(
    dfa: &Dfa,
    omega: Option<&BuchiAutomaton>,
    alph: &DistributedAlphabet,
) -> Result<SafetyReport> {
    if dfa.letter_names() != alph.letter_names() {
        return Err(Error::AlphabetMismatch);
    }
    if let Some((u, v)) = dfa.trace_closed_violation(alph) {
        return Err(Error::Validation(format!(
            "finite-word language is not trace-closed: `{}` and `{}` disagree",
            alph.format_word(&u),
            alph.format_word(&v)
        )));
    }
    let prefix_closed = dfa.is_prefix_closed();
    let diamond_violation = dfa.forward_diamond_violation(alph);
    let forward_diamond = diamond_violation.is_none();
    let omega_safety = omega.map(is_safety).transpose()?;
    Ok(SafetyReport {
        prefix_closed,
        forward_diamond,
        diamond_violation,
        omega_safety,
        locally_safety: prefix_closed && forward_diamond && omega_safety != Some(false),
    })
}
