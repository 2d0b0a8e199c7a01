//! Decision procedures for monitorability of ω-word and trace languages.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::alphabet::{DistributedAlphabet, Letter};
use crate::graph;
use crate::omega::{
    validate_trace_closed, BuchiAutomaton, Nfa, ResidualClass, ResidualOracle, StateSet,
    ValidationMode,
};
use crate::trace::Trace;
use crate::tracker::PrimalityTracker;
use crate::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonOptions {
    pub validation: ValidationMode,
    pub node_cap: usize,
}

impl Default for MonOptions {
    fn default() -> Self {
        MonOptions {
            validation: ValidationMode::Full,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Verdict of a decision procedure. `witness` is a word whose trace (or
/// prefix) has no verdict-determining extension; it is present iff the
/// verdict is negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonReport {
    pub verdict: bool,
    pub witness: Option<Vec<Letter>>,
    pub good_letters: Vec<Letter>,
}

impl MonReport {
    pub fn render(&self, letters: &[String]) -> String {
        let word = |w: &[Letter]| crate::omega::format_letters(letters, w);
        let witness = self.witness.as_deref().map_or("-".to_string(), word);
        let good = if self.good_letters.is_empty() {
            "-".to_string()
        } else {
            self.good_letters
                .iter()
                .map(|a| letters[a.0].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "verdict={} witness={} good_letters={}",
            self.verdict, witness, good
        )
    }
}

/// Classical monitorability of `L(B) ⊆ Σ^ω`: from every reachable subset
/// some subset with empty or universal residual is reachable.
pub fn decide_word_monitorable(b: &BuchiAutomaton) -> Result<MonReport> {
    let mut oracle = ResidualOracle::new(b);
    let mut ids: HashMap<StateSet, usize> = HashMap::new();
    let mut nodes = vec![b.initial_set()];
    let mut parent: Vec<Option<(usize, Letter)>> = vec![None];
    let mut adj: Vec<Vec<usize>> = Vec::new();
    ids.insert(nodes[0].clone(), 0);
    let mut i = 0;
    while i < nodes.len() {
        let mut row = Vec::new();
        for a in b.letters() {
            let t = b.post(&nodes[i], a);
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= DEFAULT_NODE_CAP {
                        return Err(Error::CapExceeded {
                            what: "subset graph nodes",
                            cap: DEFAULT_NODE_CAP,
                        });
                    }
                    ids.insert(t.clone(), nodes.len());
                    nodes.push(t);
                    parent.push(Some((i, a)));
                    nodes.len() - 1
                }
            };
            row.push(id);
        }
        adj.push(row);
        i += 1;
    }
    let good = nodes
        .iter()
        .map(|s| oracle.classify(s).map(ResidualClass::is_good))
        .collect::<Result<Vec<bool>>>()?;
    let reaches = graph::backward_reach(&adj, &good);
    let mut good_letters: Vec<Letter> = Vec::new();
    for row in &adj {
        for (k, &w) in row.iter().enumerate() {
            if good[w] {
                good_letters.push(b.letters().nth(k).expect("letter"));
            }
        }
    }
    good_letters.sort();
    good_letters.dedup();
    let failing = (0..nodes.len()).find(|&v| !reaches[v]);
    Ok(MonReport {
        verdict: failing.is_none(),
        witness: failing.map(|v| path_to(&parent, v)),
        good_letters,
    })
}

fn path_to(parent: &[Option<(usize, Letter)>], mut v: usize) -> Vec<Letter> {
    let mut word = Vec::new();
    while let Some((p, a)) = parent[v] {
        word.push(a);
        v = p;
    }
    word.reverse();
    word
}

/// Hardness gadget: over `Γ ∪ {fresh}`, `L(B)` is monitorable iff the NFA
/// accepts every word of `Γ*`. An incomplete NFA is first completed with a
/// rejecting sink so that every word of `Γ*` has a run.
pub fn gadget_from_nfa(nfa: &Nfa, fresh: &str) -> Result<BuchiAutomaton> {
    if nfa.letter_names().iter().any(|l| l == fresh) {
        return Err(Error::Invalid(format!(
            "letter `{fresh}` already in the NFA alphabet"
        )));
    }
    let gamma: Vec<Letter> = nfa.letters().collect();
    let mut letters = nfa.letter_names().to_vec();
    letters.push(fresh.to_string());
    let b_letter = Letter(gamma.len());
    let mut names = nfa.state_names().to_vec();
    let n = names.len();
    let needs_sink = !nfa.is_complete();
    let sink = needs_sink.then(|| {
        names.push(crate::omega::fresh_state_name(&names, "sink"));
        names.len() - 1
    });
    let d = push_fresh(&mut names, "d");
    let e = push_fresh(&mut names, "e");
    let f = push_fresh(&mut names, "f");
    let mut b = BuchiAutomaton::new(letters, names, nfa.initial());
    b.set_accepting(e, true);
    b.set_accepting(f, true);
    let original: Vec<usize> = (0..n).chain(sink).collect();
    for &q in &original {
        for &a in &gamma {
            let succ: Vec<usize> = if q < n {
                nfa.successors(q, a).to_vec()
            } else {
                vec![]
            };
            if succ.is_empty() {
                b.add_transition(q, a, sink.expect("completed"));
            }
            for r in succ {
                b.add_transition(q, a, r);
            }
        }
        let accepting = q < n && nfa.is_accepting(q);
        b.add_transition(q, b_letter, if accepting { f } else { d });
    }
    for &a in &gamma {
        b.add_transition(d, a, e);
        b.add_transition(e, a, e);
    }
    b.add_transition(e, b_letter, d);
    b.add_transition(d, b_letter, d);
    for c in b.letters().collect::<Vec<_>>() {
        b.add_transition(f, c, f);
    }
    Ok(b)
}

fn push_fresh(names: &mut Vec<String>, base: &str) -> usize {
    let name = crate::omega::fresh_state_name(names, base);
    names.push(name);
    names.len() - 1
}

/// Product of subset construction (one subset per automaton) and the
/// primality tracker, explored breadth-first with letters in increasing
/// order.
struct MonGraph {
    nodes: Vec<(Vec<StateSet>, PrimalityTracker)>,
    parent: Vec<Option<(usize, Letter)>>,
    adj: Vec<Vec<usize>>,
}

impl MonGraph {
    fn explore(
        alph: &DistributedAlphabet,
        automata: &[BuchiAutomaton],
        letters: &[Letter],
        cap: usize,
    ) -> Result<MonGraph> {
        let start = (
            automata.iter().map(|b| b.initial_set()).collect::<Vec<_>>(),
            PrimalityTracker::new(),
        );
        let mut ids: HashMap<(Vec<StateSet>, PrimalityTracker), usize> = HashMap::new();
        ids.insert(start.clone(), 0);
        let mut g = MonGraph {
            nodes: vec![start],
            parent: vec![None],
            adj: Vec::new(),
        };
        let mut i = 0;
        while i < g.nodes.len() {
            let (sets, tracker) = g.nodes[i].clone();
            let mut row = Vec::new();
            for &a in letters {
                let next = (
                    automata
                        .iter()
                        .zip(&sets)
                        .map(|(b, s)| b.post(s, a))
                        .collect::<Vec<_>>(),
                    tracker.step(alph, a),
                );
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        if g.nodes.len() >= cap {
                            return Err(Error::CapExceeded {
                                what: "monitorability graph nodes",
                                cap,
                            });
                        }
                        ids.insert(next.clone(), g.nodes.len());
                        g.nodes.push(next);
                        g.parent.push(Some((i, a)));
                        g.nodes.len() - 1
                    }
                };
                row.push(id);
            }
            g.adj.push(row);
            i += 1;
        }
        Ok(g)
    }

    fn prime_letter(&self, alph: &DistributedAlphabet, v: usize) -> Option<Letter> {
        self.nodes[v].1.status(alph).1
    }

    fn path(&self, v: usize) -> Vec<Letter> {
        path_to(&self.parent, v)
    }

    /// Residual class of every node, for automaton `k`.
    fn classes(&self, oracle: &mut ResidualOracle, k: usize) -> Result<Vec<ResidualClass>> {
        self.nodes
            .iter()
            .map(|(s, _)| oracle.classify(&s[k]))
            .collect()
    }
}

/// Decides local monitorability of `L(B)` over `alph`.
pub fn decide_local_monitorable(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
) -> Result<MonReport> {
    decide_local_monitorable_with(b, alph, &MonOptions::default())
}

pub fn decide_local_monitorable_with(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
    opts: &MonOptions,
) -> Result<MonReport> {
    let b = b.aligned(alph)?;
    validate_trace_closed(alph, &b, opts.validation)?;
    let letters: Vec<Letter> = alph.letters().collect();
    let g = MonGraph::explore(alph, std::slice::from_ref(&b), &letters, opts.node_cap)?;
    let mut oracle = ResidualOracle::new(&b);
    let classes = g.classes(&mut oracle, 0)?;
    let prime: Vec<Option<Letter>> = (0..g.nodes.len())
        .map(|v| g.prime_letter(alph, v))
        .collect();
    let good: Vec<bool> = (0..g.nodes.len())
        .map(|v| prime[v].is_some() && classes[v].is_good())
        .collect();
    let mut good_letters: Vec<Letter> = (0..g.nodes.len())
        .filter(|&v| good[v])
        .filter_map(|v| prime[v])
        .collect();
    good_letters.sort();
    good_letters.dedup();
    let first_prime = (0..g.nodes.len()).find(|&v| prime[v].is_some());
    if good_letters.is_empty() {
        return Ok(MonReport {
            verdict: false,
            witness: Some(first_prime.map(|v| g.path(v)).unwrap_or_default()),
            good_letters,
        });
    }
    let comps: HashSet<usize> = good_letters.iter().map(|&a| alph.component_of(a)).collect();
    if comps.len() >= 2 {
        return Ok(MonReport {
            verdict: true,
            witness: None,
            good_letters,
        });
    }
    let c = *comps.iter().next().expect("one component");
    let reaches = graph::backward_reach(&g.adj, &good);
    let failing = (0..g.nodes.len())
        .find(|&v| prime[v].is_some_and(|a| alph.component_of(a) == c) && !reaches[v]);
    Ok(MonReport {
        verdict: failing.is_none(),
        witness: failing.map(|v| g.path(v)),
        good_letters,
    })
}

/// Family monitorability over a connected alphabet: every reachable prime
/// can be extended to a prime `t` with `tR ⊆ L_i` for some member.
pub fn decide_family_local_monitorable(
    family: &[BuchiAutomaton],
    alph: &DistributedAlphabet,
) -> Result<MonReport> {
    decide_family_local_monitorable_with(family, alph, &MonOptions::default())
}

pub fn decide_family_local_monitorable_with(
    family: &[BuchiAutomaton],
    alph: &DistributedAlphabet,
    opts: &MonOptions,
) -> Result<MonReport> {
    if !alph.is_connected() {
        return Err(Error::Invalid(
            "family decision needs a connected alphabet; reduce the disconnected case first".into(),
        ));
    }
    let family = family
        .iter()
        .map(|b| b.aligned(alph))
        .collect::<Result<Vec<_>>>()?;
    for b in &family {
        validate_trace_closed(alph, b, opts.validation)?;
    }
    let letters: Vec<Letter> = alph.letters().collect();
    let g = MonGraph::explore(alph, &family, &letters, opts.node_cap)?;
    let mut universal = vec![false; g.nodes.len()];
    for (k, b) in family.iter().enumerate() {
        let mut oracle = ResidualOracle::new(b);
        for (v, c) in g.classes(&mut oracle, k)?.into_iter().enumerate() {
            universal[v] |= c == ResidualClass::Universal;
        }
    }
    let prime: Vec<Option<Letter>> = (0..g.nodes.len())
        .map(|v| g.prime_letter(alph, v))
        .collect();
    let good: Vec<bool> = (0..g.nodes.len())
        .map(|v| prime[v].is_some() && universal[v])
        .collect();
    let mut good_letters: Vec<Letter> = (0..g.nodes.len())
        .filter(|&v| good[v])
        .filter_map(|v| prime[v])
        .collect();
    good_letters.sort();
    good_letters.dedup();
    let reaches = graph::backward_reach(&g.adj, &good);
    let failing = (0..g.nodes.len()).find(|&v| prime[v].is_some() && !reaches[v]);
    Ok(MonReport {
        verdict: failing.is_none(),
        witness: failing.map(|v| g.path(v)),
        good_letters,
    })
}

/// Which language a reduced family is taken relative to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Some prime of the component forces `L`.
    Language,
    /// Some prime of the component forces the complement.
    Complement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionCase {
    /// No prime of either component forces `L` or its complement.
    NoGoodPrime,
    /// Both components contain primes forcing the same side.
    Trivial,
    /// The question reduces to the family `{L1 R', L2 R'}` on one component.
    Reduced {
        component: usize,
        polarity: Polarity,
        family_verdict: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub case: ReductionCase,
    pub verdict: bool,
    pub witness: Option<Vec<Letter>>,
}

/// Reduction for alphabets with exactly two connected components.
pub fn reduce_disconnected(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
) -> Result<ReductionReport> {
    reduce_disconnected_with(b, alph, &MonOptions::default())
}

pub fn reduce_disconnected_with(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
    opts: &MonOptions,
) -> Result<ReductionReport> {
    let comps = alph.components();
    if comps.len() != 2 {
        return Err(Error::Invalid(format!(
            "expected exactly 2 connected components, found {}",
            comps.len()
        )));
    }
    let b = b.aligned(alph)?;
    validate_trace_closed(alph, &b, opts.validation)?;
    let mut oracle = ResidualOracle::new(&b);
    struct Part {
        g: MonGraph,
        prime: Vec<bool>,
        classes: Vec<ResidualClass>,
    }
    let mut parts = Vec::new();
    for letters in &comps {
        let g = MonGraph::explore(alph, std::slice::from_ref(&b), letters, opts.node_cap)?;
        let classes = g.classes(&mut oracle, 0)?;
        let prime = (0..g.nodes.len())
            .map(|v| g.prime_letter(alph, v).is_some())
            .collect();
        parts.push(Part { g, prime, classes });
    }
    let has =
        |p: &Part, c: ResidualClass| (0..p.g.nodes.len()).any(|v| p.prime[v] && p.classes[v] == c);
    let uni: Vec<bool> = parts
        .iter()
        .map(|p| has(p, ResidualClass::Universal))
        .collect();
    let emp: Vec<bool> = parts.iter().map(|p| has(p, ResidualClass::Empty)).collect();

    if !uni.iter().chain(&emp).any(|&x| x) {
        let witness = parts
            .iter()
            .filter_map(|p| {
                (0..p.g.nodes.len())
                    .find(|&v| p.prime[v])
                    .map(|v| p.g.path(v))
            })
            .min_by_key(|w| w.len())
            .unwrap_or_default();
        return Ok(ReductionReport {
            case: ReductionCase::NoGoodPrime,
            verdict: false,
            witness: Some(witness),
        });
    }
    if (uni[0] && uni[1]) || (emp[0] && emp[1]) || (uni[0] && emp[1]) || (emp[0] && uni[1]) {
        return Ok(ReductionReport {
            case: ReductionCase::Trivial,
            verdict: true,
            witness: None,
        });
    }
    // Good primes exist in exactly one component.
    let component = if uni[0] || emp[0] { 0 } else { 1 };
    let polarity = if uni[component] {
        Polarity::Language
    } else {
        Polarity::Complement
    };
    let p = &parts[component];
    let good: Vec<bool> = (0..p.g.nodes.len())
        .map(|v| p.prime[v] && p.classes[v].is_good())
        .collect();
    let reaches = graph::backward_reach(&p.g.adj, &good);
    let failing = (0..p.g.nodes.len()).find(|&v| p.prime[v] && !reaches[v]);
    Ok(ReductionReport {
        case: ReductionCase::Reduced {
            component,
            polarity,
            family_verdict: failing.is_none(),
        },
        verdict: failing.is_none(),
        witness: failing.map(|v| p.g.path(v)),
    })
}

/// Outcome of the bounded definitional search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    Monitorable,
    NotMonitorable { witness: Vec<Letter> },
    Unknown,
}

/// Direct search of the definition: every prime `s` with at most `k1`
/// events needs a coherent prime `t` with at most `k2` events whose
/// residual is empty or universal. A negative answer is only reported when
/// the graph exploration, bounded by `depth` steps, certifies it.
pub fn brute_force_local_monitorable(
    b: &BuchiAutomaton,
    alph: &DistributedAlphabet,
    k1: usize,
    k2: usize,
    depth: usize,
) -> Result<BruteVerdict> {
    if k1 == 0 || k2 == 0 {
        return Ok(BruteVerdict::Unknown);
    }
    let b = b.aligned(alph)?;
    let mut oracle = ResidualOracle::new(&b);
    let traces = traces_up_to(alph, k1.max(k2));
    let primes: Vec<&Trace> = traces.iter().filter(|t| t.is_prime()).collect();
    let mut good_t: Vec<&Trace> = Vec::new();
    for t in primes.iter().filter(|t| t.len() <= k2) {
        let s = b.post_word(&b.initial_set(), t.normal_form());
        if oracle.classify(&s)?.is_good() {
            good_t.push(t);
        }
    }
    let failing: Vec<&Trace> = primes
        .iter()
        .filter(|s| s.len() <= k1)
        .filter(|s| !good_t.iter().any(|t| Trace::join([**s, *t]).is_some()))
        .copied()
        .collect();
    let Some(s) = failing.first() else {
        return Ok(BruteVerdict::Monitorable);
    };
    // Certification: no good prime extends s, and none lies in another
    // component (those would be coherent with s).
    let letters: Vec<Letter> = alph.letters().collect();
    let Some(from_init) = bounded_explore(
        alph,
        &b,
        &b.initial_set(),
        PrimalityTracker::new(),
        &letters,
        depth,
    ) else {
        return Ok(BruteVerdict::Unknown);
    };
    let comp_s = alph.component_of(s.max_letters()[0]);
    for (set, tr) in &from_init {
        if let Some(a) = tr.status(alph).1 {
            if alph.component_of(a) != comp_s && oracle.classify(set)?.is_good() {
                return Ok(BruteVerdict::Unknown);
            }
        }
    }
    let start = b.post_word(&b.initial_set(), s.normal_form());
    let tracker = PrimalityTracker::run(alph, s.normal_form());
    let Some(from_s) = bounded_explore(alph, &b, &start, tracker, &letters, depth) else {
        return Ok(BruteVerdict::Unknown);
    };
    for (set, tr) in &from_s {
        if tr.is_prime(alph) && oracle.classify(set)?.is_good() {
            return Ok(BruteVerdict::Unknown);
        }
    }
    Ok(BruteVerdict::NotMonitorable {
        witness: s.normal_form().to_vec(),
    })
}

/// All nodes reachable within `depth` steps, or `None` if the exploration
/// has not closed off by then.
fn bounded_explore(
    alph: &DistributedAlphabet,
    b: &BuchiAutomaton,
    start: &StateSet,
    tracker: PrimalityTracker,
    letters: &[Letter],
    depth: usize,
) -> Option<Vec<(StateSet, PrimalityTracker)>> {
    let mut seen: HashSet<(StateSet, PrimalityTracker)> = HashSet::new();
    let first = (start.clone(), tracker);
    seen.insert(first.clone());
    let mut order = vec![first.clone()];
    let mut frontier = VecDeque::from([first]);
    for _ in 0..depth {
        let mut next = VecDeque::new();
        for (s, t) in frontier {
            for &a in letters {
                let node = (b.post(&s, a), t.step(alph, a));
                if seen.insert(node.clone()) {
                    order.push(node.clone());
                    next.push_back(node);
                }
            }
        }
        if next.is_empty() {
            return Some(order);
        }
        frontier = next;
    }
    None
}

/// All traces with at most `k` events, in increasing order.
pub fn traces_up_to(alph: &DistributedAlphabet, k: usize) -> Vec<Trace> {
    let mut all: Vec<Trace> = vec![Trace::empty(alph)];
    let mut layer: Vec<Trace> = all.clone();
    for _ in 0..k {
        let mut next: HashSet<Trace> = HashSet::new();
        for t in &layer {
            for a in alph.letters() {
                next.insert(t.extend(alph, a));
            }
        }
        let mut next: Vec<Trace> = next.into_iter().collect();
        next.sort();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}
