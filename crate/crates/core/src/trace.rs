//! Finite Mazurkiewicz traces as labelled pomsets with vector timestamps.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::hash::{Hash, Hasher};

use crate::alphabet::{DistributedAlphabet, Letter, ProcSet, Process};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Event {
    pub letter: Letter,
    pub dom: ProcSet,
    /// `vclock[α]` = number of α-events in the causal past, inclusive.
    pub vclock: Vec<u32>,
    /// Immediate predecessors (indices into the event list).
    pub preds: Vec<usize>,
}

impl Event {
    /// The event's identity `(α, k)`: it is the `k`-th event on `α`, where `α`
    /// is the smallest process of its domain.
    pub fn id(&self) -> (Process, u32) {
        let p = self.dom.first().expect("domains are non-empty");
        (p, self.vclock[p.0])
    }
}

/// An immutable finite trace. Events are numbered in construction order,
/// which is always a linearization. Equality and hashing go through the
/// canonical (lexicographically least) linearization.
#[derive(Clone, Debug)]
pub struct Trace {
    nprocs: usize,
    events: Vec<Event>,
    normal: Vec<Letter>,
}

impl Trace {
    pub fn empty(alph: &DistributedAlphabet) -> Self {
        Trace {
            nprocs: alph.num_processes(),
            events: Vec::new(),
            normal: Vec::new(),
        }
    }

    /// The trace `[w]`. Events are numbered by word position.
    pub fn from_word(alph: &DistributedAlphabet, word: &[Letter]) -> Result<Self> {
        for &a in word {
            if a.0 >= alph.num_letters() {
                return Err(Error::UnknownLetter(format!("#{}", a.0)));
            }
        }
        let doms: Vec<ProcSet> = word.iter().map(|&a| alph.dom(a)).collect();
        Ok(Self::build(alph.num_processes(), word, &doms))
    }

    pub fn from_str(alph: &DistributedAlphabet, word: &str) -> Result<Self> {
        Self::from_word(alph, &alph.parse_word(word)?)
    }

    fn build(nprocs: usize, word: &[Letter], doms: &[ProcSet]) -> Self {
        let mut events: Vec<Event> = Vec::with_capacity(word.len());
        let mut last: Vec<Option<usize>> = vec![None; nprocs];
        for (i, (&a, &dom)) in word.iter().zip(doms).enumerate() {
            let mut cands: Vec<usize> = dom.iter().filter_map(|p| last[p.0]).collect();
            cands.sort_unstable();
            cands.dedup();
            let mut vclock = vec![0u32; nprocs];
            for &c in &cands {
                for (v, &w) in vclock.iter_mut().zip(&events[c].vclock) {
                    *v = (*v).max(w);
                }
            }
            for p in dom.iter() {
                vclock[p.0] += 1;
                last[p.0] = Some(i);
            }
            let preds = cands
                .iter()
                .copied()
                .filter(|&c| !cands.iter().any(|&d| d != c && leq(&events[c], &events[d])))
                .collect();
            events.push(Event {
                letter: a,
                dom,
                vclock,
                preds,
            });
        }
        let normal = normal_form_of(&events);
        Trace {
            nprocs,
            events,
            normal,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn num_processes(&self) -> usize {
        self.nprocs
    }

    /// The construction-order linearization.
    pub fn word(&self) -> Vec<Letter> {
        self.events.iter().map(|e| e.letter).collect()
    }

    /// The lexicographically least linearization.
    pub fn normal_form(&self) -> &[Letter] {
        &self.normal
    }

    /// Number of events on process `p`.
    pub fn count_on(&self, p: Process) -> u32 {
        self.events
            .iter()
            .filter(|e| e.dom.contains(p))
            .map(|e| e.vclock[p.0])
            .max()
            .unwrap_or(0)
    }

    /// Processes with at least one event.
    pub fn active(&self) -> ProcSet {
        self.events
            .iter()
            .fold(ProcSet::EMPTY, |s, e| s.union(e.dom))
    }

    /// `e ≤ f` in the trace order.
    pub fn le(&self, e: usize, f: usize) -> bool {
        leq(&self.events[e], &self.events[f])
    }

    pub fn extend(&self, alph: &DistributedAlphabet, a: Letter) -> Trace {
        let mut word = self.word();
        word.push(a);
        let mut doms: Vec<ProcSet> = self.events.iter().map(|e| e.dom).collect();
        doms.push(alph.dom(a));
        Self::build(self.nprocs, &word, &doms)
    }

    /// Maximal events: those that are last on every process of their domain.
    pub fn maximal_events(&self) -> Vec<usize> {
        let counts: Vec<u32> = (0..self.nprocs)
            .map(|p| self.count_on(Process(p)))
            .collect();
        (0..self.events.len())
            .filter(|&i| {
                let e = &self.events[i];
                e.dom.iter().all(|p| e.vclock[p.0] == counts[p.0])
            })
            .collect()
    }

    /// A trace is prime iff it is non-empty and has exactly one maximal event.
    pub fn is_prime(&self) -> bool {
        self.maximal_events().len() == 1
    }

    pub fn max_and_prime(&self) -> (Vec<usize>, bool) {
        let max = self.maximal_events();
        let prime = max.len() == 1;
        (max, prime)
    }

    /// Letters of the maximal events.
    pub fn max_letters(&self) -> Vec<Letter> {
        self.maximal_events()
            .into_iter()
            .map(|i| self.events[i].letter)
            .collect()
    }

    /// The sub-trace on the downward-closed event set selected by `keep`.
    fn restrict(&self, keep: impl Fn(&Event) -> bool) -> Trace {
        let (word, doms): (Vec<Letter>, Vec<ProcSet>) = self
            .events
            .iter()
            .filter(|e| keep(e))
            .map(|e| (e.letter, e.dom))
            .unzip();
        Self::build(self.nprocs, &word, &doms)
    }

    /// The causal past `⌈e⌉` of event `e`.
    pub fn past(&self, e: usize) -> Trace {
        let top = &self.events[e];
        self.restrict(|f| leq(f, top))
    }

    /// Causal pasts of all events, deduplicated, ordered by size then normal form.
    pub fn prime_prefixes(&self) -> Vec<Trace> {
        let mut out: Vec<Trace> = (0..self.events.len()).map(|e| self.past(e)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Least prefix containing every event located on a process of `procs`.
    pub fn view(&self, procs: ProcSet) -> Result<Trace> {
        if !procs.is_subset(ProcSet::full(self.nprocs)) {
            return Err(Error::Invalid(format!(
                "process set {:#b} is not a subset of the alphabet's processes",
                procs.0
            )));
        }
        let bound = self.view_clock(procs);
        Ok(self.restrict(|f| {
            let p = f.dom.first().expect("non-empty domain");
            f.vclock[p.0] <= bound[p.0]
        }))
    }

    /// Pointwise maximum of the vector clocks of the last events on `procs`.
    pub fn view_clock(&self, procs: ProcSet) -> Vec<u32> {
        let mut bound = vec![0u32; self.nprocs];
        for p in procs.iter() {
            if let Some(e) = self
                .events
                .iter()
                .filter(|e| e.dom.contains(p))
                .max_by_key(|e| e.vclock[p.0])
            {
                for (b, &v) in bound.iter_mut().zip(&e.vclock) {
                    *b = (*b).max(v);
                }
            }
        }
        bound
    }

    fn identity_map(&self) -> HashMap<(Process, u32), usize> {
        let mut map = HashMap::new();
        for (i, e) in self.events.iter().enumerate() {
            for p in e.dom.iter() {
                map.insert((p, e.vclock[p.0]), i);
            }
        }
        map
    }

    /// `self ≤ other` in the prefix order.
    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        if self.nprocs != other.nprocs || self.len() > other.len() {
            return false;
        }
        let ids = other.identity_map();
        self.events.iter().all(|e| match ids.get(&e.id()) {
            Some(&j) => other.events[j].letter == e.letter && other.events[j].vclock == e.vclock,
            None => false,
        })
    }

    /// Least upper bound in the prefix order, or `None` if the traces have no
    /// common extension. Events are matched by their per-process sequence
    /// numbers; the set is coherent iff all traces agree on every shared
    /// identity.
    pub fn join<'a, I>(traces: I) -> Option<Trace>
    where
        I: IntoIterator<Item = &'a Trace>,
    {
        let mut nprocs = None;
        let mut by_id: HashMap<(Process, u32), (Letter, ProcSet, &'a [u32])> = HashMap::new();
        for t in traces {
            match nprocs {
                None => nprocs = Some(t.nprocs),
                Some(n) if n != t.nprocs => return None,
                _ => {}
            }
            for e in &t.events {
                for p in e.dom.iter() {
                    let key = (p, e.vclock[p.0]);
                    match by_id.get(&key) {
                        Some(&(l, d, v)) => {
                            if l != e.letter || d != e.dom || v != e.vclock.as_slice() {
                                return None;
                            }
                        }
                        None => {
                            by_id.insert(key, (e.letter, e.dom, &e.vclock));
                        }
                    }
                }
            }
        }
        let nprocs = nprocs?;
        let mut events: Vec<(Letter, ProcSet, &[u32])> = by_id
            .into_iter()
            .filter(|((p, _), (_, d, _))| d.first() == Some(*p))
            .map(|(_, v)| v)
            .collect();
        // Causally earlier events have strictly smaller clock sums.
        events.sort_by_key(|(_, _, v)| (v.iter().map(|&x| x as u64).sum::<u64>(), v.to_vec()));
        let word: Vec<Letter> = events.iter().map(|(l, _, _)| *l).collect();
        let doms: Vec<ProcSet> = events.iter().map(|(_, d, _)| *d).collect();
        let joined = Self::build(nprocs, &word, &doms);
        debug_assert!(joined
            .events
            .iter()
            .zip(&events)
            .all(|(e, (_, _, v))| e.vclock.as_slice() == *v));
        Some(joined)
    }
}

fn leq(e: &Event, f: &Event) -> bool {
    // e is the k-th event on p; f's past holds the first vclock_f[p] p-events.
    let p = e.dom.first().expect("non-empty domain");
    e.vclock[p.0] <= f.vclock[p.0]
}

fn normal_form_of(events: &[Event]) -> Vec<Letter> {
    let n = events.len();
    let mut indeg = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in events.iter().enumerate() {
        indeg[i] = e.preds.len();
        for &p in &e.preds {
            succs[p].push(i);
        }
    }
    let mut heap: BinaryHeap<Reverse<(Letter, usize)>> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| Reverse((events[i].letter, i)))
        .collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((l, i))) = heap.pop() {
        out.push(l);
        for &s in &succs[i] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse((events[s].letter, s)));
            }
        }
    }
    out
}

impl PartialEq for Trace {
    fn eq(&self, other: &Self) -> bool {
        self.nprocs == other.nprocs && self.normal == other.normal
    }
}

impl Eq for Trace {}

impl Hash for Trace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.normal.hash(state);
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Trace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), &self.normal).cmp(&(other.len(), &other.normal))
    }
}

/// Lexicographically least linearization of `[w]`.
pub fn normal_form(alph: &DistributedAlphabet, word: &[Letter]) -> Result<Vec<Letter>> {
    Ok(Trace::from_word(alph, word)?.normal)
}

/// `u ∼_I v`.
pub fn equivalent(alph: &DistributedAlphabet, u: &[Letter], v: &[Letter]) -> Result<bool> {
    Ok(u.len() == v.len() && normal_form(alph, u)? == normal_form(alph, v)?)
}
