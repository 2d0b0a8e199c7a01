//! Büchi complementation.
//!
//! Deterministic inputs take a direct route (flip acceptance when the
//! automaton is weak, otherwise guess the point after which no accepting
//! state is visited). Everything else goes through the rank-based
//! construction with even-rank tightening on accepting states.

use std::collections::HashMap;

use super::buchi::BuchiAutomaton;
use crate::alphabet::Letter;
use crate::graph;
use crate::{Error, Result};

/// Maximal number of states accepted by the rank-based construction.
pub const DEFAULT_COMPLEMENT_CAP: usize = 8;

const NODE_CAP: usize = 200_000;

pub fn complement(b: &BuchiAutomaton) -> Result<BuchiAutomaton> {
    complement_with_cap(b, DEFAULT_COMPLEMENT_CAP)
}

pub fn complement_with_cap(b: &BuchiAutomaton, cap: usize) -> Result<BuchiAutomaton> {
    if b.is_deterministic() {
        let d = b.completed();
        let d = d.restrict(&d.reachable_states());
        if is_weak(&d) {
            let mut c = d.clone();
            for q in 0..c.num_states() {
                c.set_accepting(q, !d.is_accepting(q));
            }
            return Ok(c);
        }
        return Ok(deterministic_complement(&d));
    }
    let t = b.trimmed();
    if t.num_states() > cap.min(32) {
        return Err(Error::CapExceeded {
            what: "states for complementation",
            cap,
        });
    }
    rank_complement(&t)
}

/// Every cycle is entirely accepting or entirely non-accepting.
fn is_weak(b: &BuchiAutomaton) -> bool {
    let adj = b.adjacency();
    let comp = graph::scc(&adj);
    let cyclic = graph::cyclic_nodes(&adj);
    let mut seen: HashMap<usize, bool> = HashMap::new();
    for q in 0..b.num_states() {
        if !cyclic[q] {
            continue;
        }
        let acc = b.is_accepting(q);
        if *seen.entry(comp[q]).or_insert(acc) != acc {
            return false;
        }
    }
    true
}

/// Complete deterministic `d`: a copy of `d` plus a copy restricted to
/// non-accepting states, entered nondeterministically and fully accepting.
fn deterministic_complement(d: &BuchiAutomaton) -> BuchiAutomaton {
    let n = d.num_states();
    let mut names: Vec<String> = d.state_names().to_vec();
    names.extend(d.state_names().iter().map(|s| format!("{s}'")));
    let mut c = BuchiAutomaton::new(d.letter_names().to_vec(), names, d.initial());
    for q in 0..n {
        if !d.is_accepting(q) {
            c.set_accepting(n + q, true);
        }
        for a in d.letters() {
            for &r in d.successors(q, a) {
                c.add_transition(q, a, r);
                if !d.is_accepting(r) {
                    c.add_transition(q, a, n + r);
                    if !d.is_accepting(q) {
                        c.add_transition(n + q, a, n + r);
                    }
                }
            }
        }
    }
    c.trimmed()
}

const NONE: u8 = u8::MAX;

/// Level ranking plus breakpoint set (bitmask of states still owing an
/// odd rank visit).
type RankState = (Vec<u8>, u32);

fn rank_complement(b: &BuchiAutomaton) -> Result<BuchiAutomaton> {
    let n = b.num_states();
    let max_rank = (2 * n) as u8;
    let mut f0 = vec![NONE; n];
    f0[b.initial()] = max_rank;
    let start: RankState = (f0, 0);
    let mut ids: HashMap<RankState, usize> = HashMap::new();
    ids.insert(start.clone(), 0);
    let mut nodes = vec![start];
    let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (f, o) = nodes[i].clone();
        for a in b.letters() {
            for succ in rank_successors(b, &f, o, a) {
                let id = match ids.get(&succ) {
                    Some(&id) => id,
                    None => {
                        if nodes.len() >= NODE_CAP {
                            return Err(Error::CapExceeded {
                                what: "complement states",
                                cap: NODE_CAP,
                            });
                        }
                        ids.insert(succ.clone(), nodes.len());
                        nodes.push(succ);
                        nodes.len() - 1
                    }
                };
                edges.push((i, a, id));
            }
        }
        i += 1;
    }
    let names = (0..nodes.len()).map(|i| format!("r{i}")).collect();
    let mut c = BuchiAutomaton::new(b.letter_names().to_vec(), names, 0);
    for (i, (_, o)) in nodes.iter().enumerate() {
        c.set_accepting(i, *o == 0);
    }
    for (p, a, q) in edges {
        c.add_transition(p, a, q);
    }
    Ok(c.trimmed())
}

fn rank_successors(b: &BuchiAutomaton, f: &[u8], o: u32, a: Letter) -> Vec<RankState> {
    let n = b.num_states();
    // Upper bound for each successor: the minimal rank of its predecessors.
    let mut bound = vec![NONE; n];
    for q in 0..n {
        if f[q] == NONE {
            continue;
        }
        for &r in b.successors(q, a) {
            bound[r] = bound[r].min(f[q]);
        }
    }
    let targets: Vec<usize> = (0..n).filter(|&r| bound[r] != NONE).collect();
    let mut o_post = 0u32;
    for q in 0..n {
        if o & (1 << q) != 0 {
            for &r in b.successors(q, a) {
                o_post |= 1 << r;
            }
        }
    }
    let mut out = Vec::new();
    let mut g = vec![NONE; n];
    enumerate(b, &targets, &bound, 0, &mut g, &mut |g| {
        let evens = targets
            .iter()
            .filter(|&&r| g[r] % 2 == 0)
            .fold(0u32, |m, &r| m | (1 << r));
        let o2 = if o == 0 { evens } else { o_post & evens };
        out.push((g.to_vec(), o2));
    });
    out
}

fn enumerate(
    b: &BuchiAutomaton,
    targets: &[usize],
    bound: &[u8],
    k: usize,
    g: &mut Vec<u8>,
    emit: &mut dyn FnMut(&[u8]),
) {
    if k == targets.len() {
        emit(g);
        return;
    }
    let r = targets[k];
    for rank in 0..=bound[r] {
        if b.is_accepting(r) && rank % 2 == 1 {
            continue;
        }
        g[r] = rank;
        enumerate(b, targets, bound, k + 1, g, emit);
    }
    g[r] = NONE;
}
