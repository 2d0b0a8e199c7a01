//! Small explicit-graph utilities shared by the automata analyses.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// Strongly connected components (Tarjan, iterative). Returns the component
/// index of every node.
pub(crate) fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Nodes lying on a cycle (non-trivial SCC or self-loop).
pub(crate) fn cyclic_nodes(adj: &[Vec<usize>]) -> Vec<bool> {
    let comp = scc(adj);
    let mut size = vec![0usize; adj.len()];
    for &c in &comp {
        size[c] += 1;
    }
    (0..adj.len())
        .map(|v| size[comp[v]] > 1 || adj[v].contains(&v))
        .collect()
}

/// Nodes from which some node in `targets` is reachable (including targets).
pub(crate) fn backward_reach(adj: &[Vec<usize>], targets: &[bool]) -> Vec<bool> {
    let n = adj.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            rev[w].push(v);
        }
    }
    let mut seen = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| targets[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

/// Nodes on a cycle that passes through an accepting node.
pub(crate) fn accepting_cycle_nodes(adj: &[Vec<usize>], accepting: &[bool]) -> Vec<bool> {
    let comp = scc(adj);
    let cyclic = cyclic_nodes(adj);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut good = vec![false; ncomp];
    for v in 0..adj.len() {
        if accepting[v] && cyclic[v] {
            good[comp[v]] = true;
        }
    }
    (0..adj.len()).map(|v| cyclic[v] && good[comp[v]]).collect()
}

/// Explores the graph reachable from `starts` and reports whether an
/// accepting node on a cycle is reachable.
pub(crate) fn accepting_lasso_reachable<N, S, A>(starts: Vec<N>, mut succ: S, accepting: A) -> bool
where
    N: Hash + Eq + Clone,
    S: FnMut(&N) -> Vec<N>,
    A: Fn(&N) -> bool,
{
    let (nodes, adj) = explore(starts, &mut succ);
    let acc: Vec<bool> = nodes.iter().map(&accepting).collect();
    accepting_cycle_nodes(&adj, &acc).into_iter().any(|b| b)
}

pub(crate) fn explore<N, S>(starts: Vec<N>, succ: &mut S) -> (Vec<N>, Vec<Vec<usize>>)
where
    N: Hash + Eq + Clone,
    S: FnMut(&N) -> Vec<N>,
{
    let mut ids: HashMap<N, usize> = HashMap::new();
    let mut nodes: Vec<N> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if !ids.contains_key(&s) {
            ids.insert(s.clone(), nodes.len());
            nodes.push(s);
            adj.push(Vec::new());
            queue.push_back(nodes.len() - 1);
        }
    }
    while let Some(v) = queue.pop_front() {
        let node = nodes[v].clone();
        for w in succ(&node) {
            let id = match ids.get(&w) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    ids.insert(w.clone(), id);
                    nodes.push(w);
                    adj.push(Vec::new());
                    queue.push_back(id);
                    id
                }
            };
            adj[v].push(id);
        }
    }
    (nodes, adj)
}
