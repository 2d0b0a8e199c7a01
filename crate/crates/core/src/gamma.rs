//! Γ-infinite traces given as lassos, and acceptance conditions of
//! asynchronous automata restricted to them.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::alphabet::{DistributedAlphabet, Letter, ProcSet, Process};
use crate::async_automata::{Acceptance, AcceptanceCondition, AsyncAutomaton, GlobalState, Run};
use crate::trace::Trace;
use crate::{Error, Result};

/// `u v^ω` represents a Γ-infinite trace, with the factorization
/// condition checked on `u v^(|Proc|+1)`.
pub fn is_gamma_infinite_lasso(
    alph: &DistributedAlphabet,
    gamma: ProcSet,
    u: &[Letter],
    v: &[Letter],
) -> Result<bool> {
    is_gamma_infinite_lasso_with(alph, gamma, u, v, alph.num_processes() + 1)
}

pub fn is_gamma_infinite_lasso_with(
    alph: &DistributedAlphabet,
    gamma: ProcSet,
    u: &[Letter],
    v: &[Letter],
    power: usize,
) -> Result<bool> {
    if v.is_empty() {
        return Err(Error::EmptyLoop);
    }
    let loop_procs = v
        .iter()
        .fold(ProcSet::default(), |s, &a| s.union(alph.dom(a)));
    if !gamma.is_subset(loop_procs) {
        return Ok(false);
    }
    let mut letters: Vec<Letter> = u.iter().chain(v).copied().collect();
    letters.sort();
    letters.dedup();
    if !alph.is_connected_subset(&letters) {
        return Ok(false);
    }
    let mut word = u.to_vec();
    for _ in 0..power.max(2) {
        word.extend_from_slice(v);
    }
    let t = Trace::from_word(alph, &word)?;
    // Events are numbered in word order.
    let checked = u.len() + v.len();
    let meets: Vec<bool> = word
        .iter()
        .map(|&a| alph.dom(a).intersects(gamma))
        .collect();
    Ok((0..checked).all(|e| meets[e] || (e + 1..word.len()).any(|f| meets[f] && t.le(e, f))))
}

/// Reachable state with a loop realizing one Muller set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MullerWitness {
    pub target: Vec<BTreeSet<usize>>,
    pub access: Vec<Letter>,
    pub loop_word: Vec<Letter>,
    pub loop_start: GlobalState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessSearch {
    Found(MullerWitness),
    /// No witness exists (the search space was exhausted).
    None,
    /// Loops longer than the bound would have to be explored.
    BoundExceeded,
}

/// Searches for a reachable state `s` and a loop on `s` of length at most
/// `bound` whose visited `α`-states are exactly `target[α]` for `α ∈ Γ`,
/// such that access and loop form a Γ-infinite lasso.
pub fn find_muller_witness(
    aa: &AsyncAutomaton,
    target: &[BTreeSet<usize>],
    gamma: ProcSet,
    bound: usize,
) -> Result<WitnessSearch> {
    if !aa.is_deterministic() {
        return Err(Error::NotDeterministic("asynchronous automaton".into()));
    }
    let alph = aa.alphabet();
    let procs: Vec<Process> = gamma.iter().collect();
    if target.len() != procs.len() {
        return Err(Error::Invalid(format!(
            "target has {} components, Γ has {} processes",
            target.len(),
            procs.len()
        )));
    }
    if bound == 0 {
        return Ok(WitnessSearch::BoundExceeded);
    }
    if target.iter().any(|t| t.is_empty()) {
        return Ok(WitnessSearch::None);
    }
    let exp = aa.global_expansion();
    let access = bfs_paths(&exp.succ);
    let full: Vec<u64> = target
        .iter()
        .map(|t| t.iter().fold(0, |m, &s| m | 1 << s))
        .collect();
    let mut exceeded = false;
    for (s, u) in access.iter().enumerate() {
        if !procs
            .iter()
            .zip(target)
            .all(|(p, t)| t.contains(&exp.states[s][p.0]))
        {
            continue;
        }
        // Nodes: (state, visited masks per Γ process, letters used). The
        // lasso conditions depend on the loop only through its letters.
        type Node = (usize, Vec<u64>, u64);
        let start: Node = (s, vec![0; procs.len()], 0);
        let mut seen: HashSet<Node> = HashSet::new();
        let mut layer: Vec<(Node, Vec<Letter>)> = vec![(start, Vec::new())];
        let mut depth = 0;
        while !layer.is_empty() {
            if depth == bound {
                exceeded = true;
                break;
            }
            depth += 1;
            let mut next = Vec::new();
            for ((q, masks, used), word) in &layer {
                for a in alph.letters() {
                    let Some(&r) = exp.succ[*q][a.0].first() else {
                        continue;
                    };
                    let mut m = masks.clone();
                    let mut ok = true;
                    for (i, p) in procs.iter().enumerate() {
                        if alph.dom(a).contains(*p) {
                            let st = exp.states[r][p.0];
                            ok &= target[i].contains(&st);
                            m[i] |= 1 << st;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let node: Node = (r, m, used | 1 << a.0);
                    let mut w = word.clone();
                    w.push(a);
                    if r == s && node.1 == full && is_gamma_infinite_lasso(alph, gamma, u, &w)? {
                        return Ok(WitnessSearch::Found(MullerWitness {
                            target: target.to_vec(),
                            access: u.clone(),
                            loop_word: w,
                            loop_start: exp.states[s].clone(),
                        }));
                    }
                    if seen.insert(node.clone()) {
                        next.push((node, w));
                    }
                }
            }
            layer = next;
        }
    }
    Ok(if exceeded {
        WitnessSearch::BoundExceeded
    } else {
        WitnessSearch::None
    })
}

fn bfs_paths(succ: &[Vec<Vec<usize>>]) -> Vec<Vec<Letter>> {
    let mut path: Vec<Option<Vec<Letter>>> = vec![None; succ.len()];
    path[0] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(q) = queue.pop_front() {
        for (a, targets) in succ[q].iter().enumerate() {
            for &r in targets {
                if path[r].is_none() {
                    let mut w = path[q].clone().expect("visited");
                    w.push(Letter(a));
                    path[r] = Some(w);
                    queue.push_back(r);
                }
            }
        }
    }
    path.into_iter()
        .map(|p| p.expect("expansion is reachable"))
        .collect()
}

/// Replaces a Muller condition by the conjunctive Büchi condition "every
/// state of `T_α` recurs", keeping only the sets that have a witness.
pub fn muller_to_buchi(
    aa: &AsyncAutomaton,
    cond: &AcceptanceCondition,
    bound: usize,
) -> Result<AcceptanceCondition> {
    let Acceptance::Muller(fams) = &cond.kind else {
        return Err(Error::Invalid("expected a Muller condition".into()));
    };
    let mut kept = Vec::new();
    for t in fams {
        match find_muller_witness(aa, t, cond.gamma, bound)? {
            WitnessSearch::Found(_) => kept.push(t.clone()),
            WitnessSearch::None => log::info!("dropping Muller set without witness"),
            WitnessSearch::BoundExceeded => {
                return Err(Error::CapExceeded {
                    what: "Muller witness loop length",
                    cap: bound,
                })
            }
        }
    }
    Ok(AcceptanceCondition {
        gamma: cond.gamma,
        kind: Acceptance::GenBuchi(kept),
    })
}

/// Rewrites a conjunctive condition with a single family member into a
/// plain Büchi condition by giving every Γ process a round-robin counter
/// over `T_α` and a flag marking the step that completes a round.
pub fn single_tuple_buchi(
    aa: &AsyncAutomaton,
    cond: &AcceptanceCondition,
) -> Result<(AsyncAutomaton, AcceptanceCondition)> {
    let t = match &cond.kind {
        Acceptance::GenBuchi(f) if f.len() == 1 => f[0].clone(),
        _ => {
            return Err(Error::Invalid(
                "counter augmentation needs a conjunctive condition with exactly one member".into(),
            ))
        }
    };
    let alph = aa.alphabet();
    let procs: Vec<Process> = cond.gamma.iter().collect();
    let order: HashMap<Process, Vec<usize>> = procs
        .iter()
        .zip(&t)
        .map(|(&p, set)| (p, set.iter().copied().collect()))
        .collect();
    // Augmented local state of a Γ process: (s, k, wrapped).
    let enc = |p: Process, s: usize, k: usize, w: bool| -> usize {
        let n = order[&p].len();
        (s * n + k) * 2 + w as usize
    };
    let mut local = Vec::new();
    for p in alph.processes() {
        let n = aa.num_local_states(p);
        match order.get(&p) {
            None => local.push(
                (0..n)
                    .map(|s| aa.local_state_name(p, s).to_string())
                    .collect(),
            ),
            Some(ord) => {
                let mut names = Vec::new();
                for s in 0..n {
                    for k in 0..ord.len() {
                        for w in [false, true] {
                            let mark = if w { "!" } else { "" };
                            names.push(format!("{}#{k}{mark}", aa.local_state_name(p, s)));
                        }
                    }
                }
                local.push(names);
            }
        }
    }
    let init: GlobalState = alph
        .processes()
        .map(|p| {
            let s = aa.init()[p.0];
            if order.contains_key(&p) {
                enc(p, s, 0, false)
            } else {
                s
            }
        })
        .collect();
    let mut out = AsyncAutomaton::new(alph, local, init);
    for a in alph.letters() {
        let dom: Vec<Process> = alph.dom(a).iter().collect();
        for (from, to) in aa.transitions(a) {
            // Enumerate the counter values of the Γ participants.
            let mut combos: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
            for (i, &p) in dom.iter().enumerate() {
                let mut next = Vec::new();
                for (f, g) in &combos {
                    match order.get(&p) {
                        None => {
                            let mut f = f.clone();
                            let mut g = g.clone();
                            f.push(from[i]);
                            g.push(to[i]);
                            next.push((f, g));
                        }
                        Some(ord) => {
                            for k in 0..ord.len() {
                                for w in [false, true] {
                                    let (k2, w2) = if to[i] == ord[k] {
                                        if k + 1 == ord.len() {
                                            (0, true)
                                        } else {
                                            (k + 1, false)
                                        }
                                    } else {
                                        (k, false)
                                    };
                                    let mut f = f.clone();
                                    let mut g = g.clone();
                                    f.push(enc(p, from[i], k, w));
                                    g.push(enc(p, to[i], k2, w2));
                                    next.push((f, g));
                                }
                            }
                        }
                    }
                }
                combos = next;
            }
            for (f, g) in combos {
                out.add_transition(a, f, g);
            }
        }
    }
    // Every combination of wrapped states, one per Γ process.
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for &p in &procs {
        let n = aa.num_local_states(p);
        let mut next = Vec::new();
        for f in &tuples {
            for s in 0..n {
                let mut f = f.clone();
                f.push(enc(p, s, 0, true));
                next.push(f);
            }
        }
        tuples = next;
    }
    Ok((
        out,
        AcceptanceCondition {
            gamma: cond.gamma,
            kind: Acceptance::Buchi(tuples),
        },
    ))
}

/// `p` belongs to `K^f_{n,α}`: on the run over `p`, at least `n` events on
/// `α` leave `α` in state `f_α`. `f` is indexed by the processes of
/// `gamma` in increasing order.
pub fn buchi_witness_membership(
    aa: &AsyncAutomaton,
    gamma: ProcSet,
    f: &[usize],
    n: usize,
    alpha: Process,
    p: &Trace,
) -> Result<bool> {
    let alph = aa.alphabet();
    if !p.is_prime() {
        return Err(Error::NotPrime(alph.format_word(p.normal_form())));
    }
    let last = p.max_letters()[0];
    if !alph.dom(last).contains(alpha) {
        return Err(Error::Invalid(format!(
            "process {} is not in the domain of the maximal event",
            alph.process_name(alpha)
        )));
    }
    let pos = gamma.iter().position(|q| q == alpha).ok_or_else(|| {
        Error::Invalid(format!("process {} is not in Γ", alph.process_name(alpha)))
    })?;
    if n == 0 {
        return Ok(true);
    }
    let mut s = aa.init().clone();
    let mut hits = 0;
    for &a in p.normal_form() {
        match aa.run_from(&s, &[a]) {
            Run::Done(t) => s = t,
            Run::Stuck(_) => return Ok(false),
        }
        if alph.dom(a).contains(alpha) && s[alpha.0] == f[pos] {
            hits += 1;
        }
    }
    Ok(hits >= n)
}
