//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use locmon::async_automata::AsyncAutomaton;
use locmon::omega::{BuchiAutomaton, Nfa};
use locmon::{DistributedAlphabet, Letter, Process};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fig1() -> DistributedAlphabet {
    DistributedAlphabet::parse(
        "processes p q r\naction a p q\naction b q r\naction c p\naction d r\n",
    )
    .unwrap()
}

pub fn sec3() -> DistributedAlphabet {
    DistributedAlphabet::parse("processes x y\naction a x\naction b y\naction c x y\n").unwrap()
}

pub fn disc() -> DistributedAlphabet {
    DistributedAlphabet::parse("processes x y\naction a x\naction b y\n").unwrap()
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// All words over `k` letters of length at most `max`, shortest first.
pub fn words_up_to(k: usize, max: usize) -> Vec<Vec<Letter>> {
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..k {
                let mut v = w.clone();
                v.push(Letter(a));
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Causal order on positions of `w`: the reflexive-transitive closure of
/// "earlier and dependent".
pub fn pomset_order(alph: &DistributedAlphabet, w: &[Letter]) -> Vec<Vec<bool>> {
    let n = w.len();
    let mut le = vec![vec![false; n]; n];
    for j in 0..n {
        le[j][j] = true;
        for i in 0..j {
            if !alph.independent(w[i], w[j]) || w[i] == w[j] {
                le[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if le[i][k] {
                for j in 0..n {
                    if le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
    }
    le
}

/// Positions with nothing strictly above them.
pub fn pomset_max(alph: &DistributedAlphabet, w: &[Letter]) -> Vec<usize> {
    let le = pomset_order(alph, w);
    (0..w.len())
        .filter(|&i| (0..w.len()).all(|j| j == i || !le[i][j]))
        .collect()
}

pub fn random_buchi(
    letters: &[String],
    n: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> BuchiAutomaton {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut b = BuchiAutomaton::new(letters.to_vec(), names, 0);
    for q in 0..n {
        if rng.gen_bool(0.5) {
            b.set_accepting(q, true);
        }
        for a in 0..letters.len() {
            for r in 0..n {
                if rng.gen_bool(density) {
                    b.add_transition(q, Letter(a), r);
                }
            }
        }
    }
    b
}

pub fn random_nfa(letters: &[String], n: usize, rng: &mut ChaCha8Rng) -> Nfa {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut text = format!(
        "alphabet {}\nstates {}\ninitial s0\n",
        letters.join(" "),
        names.join(" ")
    );
    let acc: Vec<&str> = names
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(String::as_str)
        .collect();
    if !acc.is_empty() {
        text.push_str(&format!("accepting {}\n", acc.join(" ")));
    }
    for p in &names {
        for a in letters {
            for q in &names {
                if rng.gen_bool(0.35) {
                    text.push_str(&format!("trans {p} {a} {q}\n"));
                }
            }
        }
    }
    Nfa::parse(&text, None).unwrap()
}

/// Universality of an NFA by the plain subset construction.
pub fn nfa_universal(a: &Nfa) -> bool {
    let k = a.letter_names().len();
    let start: BTreeSet<usize> = [a.initial()].into();
    let mut seen = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if !s.iter().any(|&q| a.is_accepting(q)) {
            return false;
        }
        for l in 0..k {
            let t: BTreeSet<usize> = s
                .iter()
                .flat_map(|&q| a.successors(q, Letter(l)).to_vec())
                .collect();
            if !seen.contains(&t) {
                seen.push(t.clone());
                queue.push_back(t);
            }
        }
    }
    true
}

/// Random deterministic asynchronous automaton with at most `max_states`
/// local states per process; each local transition is present with
/// probability `density`.
pub fn random_det_async(
    alph: &DistributedAlphabet,
    max_states: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> AsyncAutomaton {
    let sizes: Vec<usize> = alph
        .processes()
        .map(|_| rng.gen_range(1..=max_states))
        .collect();
    let local: Vec<Vec<String>> = sizes
        .iter()
        .map(|&n| (0..n).map(|s| s.to_string()).collect())
        .collect();
    let mut aa = AsyncAutomaton::new(alph, local, vec![0; sizes.len()]);
    for a in alph.letters() {
        let dom: Vec<Process> = alph.dom(a).iter().collect();
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for p in &dom {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..sizes[p.0]).map(move |s| {
                        let mut t = t.clone();
                        t.push(s);
                        t
                    })
                })
                .collect();
        }
        for from in tuples {
            if rng.gen_bool(density) {
                let to = dom.iter().map(|p| rng.gen_range(0..sizes[p.0])).collect();
                aa.add_transition(a, from, to);
            }
        }
    }
    aa
}

/// Büchi automaton for the infinite runs of a deterministic asynchronous
/// automaton on which every process `gamma[i]` enters local state `f[i]`
/// infinitely often. Trace-closed because each process's sequence of local
/// states depends only on the trace.
pub fn local_buchi_language(aa: &AsyncAutomaton, gamma: &[Process], f: &[usize]) -> BuchiAutomaton {
    let alph = aa.alphabet();
    let exp = aa.global_expansion();
    let m = gamma.len();
    let id = |g: usize, k: usize, w: bool| (g * m + k) * 2 + w as usize;
    let names: Vec<String> = (0..exp.states.len() * m * 2)
        .map(|i| format!("g{i}"))
        .collect();
    let mut b = BuchiAutomaton::new(alph.letter_names().to_vec(), names, id(0, 0, false));
    for g in 0..exp.states.len() {
        for k in 0..m {
            for w in [false, true] {
                b.set_accepting(id(g, k, w), w);
                for a in alph.letters() {
                    if let Some(&h) = exp.succ[g][a.0].first() {
                        let hit =
                            alph.dom(a).contains(gamma[k]) && exp.states[h][gamma[k].0] == f[k];
                        let (k2, w2) = match (hit, k + 1 == m) {
                            (true, true) => (0, true),
                            (true, false) => (k + 1, false),
                            _ => (k, false),
                        };
                        b.add_transition(id(g, k, w), a, id(h, k2, w2));
                    }
                }
            }
        }
    }
    b.trimmed()
}

/// A random trace-closed language: the local-Büchi language of a random
/// deterministic asynchronous automaton.
pub fn random_local_language(alph: &DistributedAlphabet, rng: &mut ChaCha8Rng) -> BuchiAutomaton {
    let aa = random_det_async(alph, 2, 0.8, rng);
    let procs: Vec<Process> = alph.processes().filter(|_| rng.gen_bool(0.6)).collect();
    let gamma = if procs.is_empty() {
        vec![Process(0)]
    } else {
        procs
    };
    let f: Vec<usize> = gamma
        .iter()
        .map(|p| rng.gen_range(0..aa.num_local_states(*p)))
        .collect();
    local_buchi_language(&aa, &gamma, &f)
}

/// Random walk of enabled letters from the initial state; `None` when the
/// system deadlocks early.
pub fn random_run(aa: &AsyncAutomaton, len: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Letter>> {
    let alph = aa.alphabet();
    let mut s = aa.init().clone();
    let mut w = Vec::new();
    for _ in 0..len {
        let en: Vec<Letter> = alph.letters().filter(|&a| aa.enabled(&s, a)).collect();
        if en.is_empty() {
            return None;
        }
        let a = en[rng.gen_range(0..en.len())];
        s = aa.step(&s, a).unwrap();
        w.push(a);
    }
    Some(w)
}

pub fn random_word(k: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<Letter> {
    (0..len).map(|_| Letter(rng.gen_range(0..k))).collect()
}

/// Equivalence classes of words of one length under adjacent independent
/// swaps, as a map from word to the lexicographically least member.
pub fn swap_class_minima(
    alph: &DistributedAlphabet,
    len: usize,
) -> HashMap<Vec<Letter>, Vec<Letter>> {
    let k = alph.num_letters();
    let words: Vec<Vec<Letter>> = words_up_to(k, len)
        .into_iter()
        .filter(|w| w.len() == len)
        .collect();
    let index: HashMap<Vec<Letter>, usize> = words
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, w) in words.iter().enumerate() {
        for p in 0..len.saturating_sub(1) {
            if w[p] != w[p + 1] && alph.independent(w[p], w[p + 1]) {
                let mut v = w.clone();
                v.swap(p, p + 1);
                let (a, b) = (find(&mut parent, i), find(&mut parent, index[&v]));
                parent[a] = b;
            }
        }
    }
    let mut min: HashMap<usize, Vec<Letter>> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let r = find(&mut parent, i);
        let e = min.entry(r).or_insert_with(|| w.clone());
        if w < e {
            *e = w.clone();
        }
    }
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let r = find(&mut parent, i);
            (w.clone(), min[&r].clone())
        })
        .collect()
}
