use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BipartiteGraph, Matching, Node};

const INF: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchingAlgorithm {
    #[default]
    HopcroftKarp,
    /// One augmenting-path search per equation. Quadratic, kept as a
    /// cross-check for Hopcroft–Karp.
    AugmentingPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchingOptions {
    pub algorithm: MatchingAlgorithm,
    /// Shuffle equation and adjacency order with this seed. `None` keeps
    /// insertion order, which makes the result fully deterministic.
    pub seed: Option<u64>,
}

/// Maximum matching by Hopcroft–Karp in insertion order.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    max_matching_with(g, MatchingOptions::default())
}

pub fn max_matching_with(g: &BipartiteGraph, opts: MatchingOptions) -> Matching {
    extend_to_maximum(g, Matching::empty(g), opts)
}

/// Grow `initial` into a maximum matching. Pairs of `initial` stay covered
/// nodes, though their partners may change along augmenting paths.
pub fn extend_to_maximum(g: &BipartiteGraph, initial: Matching, opts: MatchingOptions) -> Matching {
    let order = Ordering::new(g, opts.seed);
    let mut m = initial;
    match opts.algorithm {
        MatchingAlgorithm::HopcroftKarp => hopcroft_karp(g, &order, &mut m),
        MatchingAlgorithm::AugmentingPath => simple_augment(g, &order, &mut m),
    }
    m
}

/// Processing order of equations and of each equation's variables.
struct Ordering {
    eqs: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl Ordering {
    fn new(g: &BipartiteGraph, seed: Option<u64>) -> Self {
        let mut eqs: Vec<usize> = (0..g.n_eqs()).collect();
        let mut adj: Vec<Vec<usize>> = (0..g.n_eqs()).map(|j| g.eq_neighbors(j).to_vec()).collect();
        if let Some(s) = seed {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            eqs.shuffle(&mut rng);
            for a in &mut adj {
                a.shuffle(&mut rng);
            }
        }
        Ordering { eqs, adj }
    }
}

fn hopcroft_karp(g: &BipartiteGraph, order: &Ordering, m: &mut Matching) {
    let n = g.n_eqs();
    let mut dist = vec![INF; n];
    let mut it = vec![0usize; n];
    let mut queue = VecDeque::new();
    loop {
        // Layer equations by alternating distance from the exposed ones.
        queue.clear();
        for &j in &order.eqs {
            if m.var_of(j).is_none() {
                dist[j] = 0;
                queue.push_back(j);
            } else {
                dist[j] = INF;
            }
        }
        let mut found = false;
        while let Some(j) = queue.pop_front() {
            for &i in &order.adj[j] {
                match m.eq_of(i) {
                    None => found = true,
                    Some(j2) if dist[j2] == INF => {
                        dist[j2] = dist[j] + 1;
                        queue.push_back(j2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        it.iter_mut().for_each(|x| *x = 0);
        let mut grew = false;
        for &j in &order.eqs {
            if m.var_of(j).is_none() && augment_layered(j, order, &mut dist, &mut it, m) {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
}

/// Iterative layered DFS from exposed equation `root`.
fn augment_layered(
    root: usize,
    order: &Ordering,
    dist: &mut [usize],
    it: &mut [usize],
    m: &mut Matching,
) -> bool {
    let mut stack = vec![root];
    let mut via: Vec<usize> = Vec::new();
    while let Some(&j) = stack.last() {
        if it[j] < order.adj[j].len() {
            let i = order.adj[j][it[j]];
            it[j] += 1;
            match m.eq_of(i) {
                None => {
                    via.push(i);
                    for (k, &eq) in stack.iter().enumerate() {
                        m.set(via[k], eq);
                    }
                    return true;
                }
                Some(j2) if dist[j2] != INF && dist[j2] == dist[j] + 1 => {
                    via.push(i);
                    stack.push(j2);
                }
                _ => {}
            }
        } else {
            dist[j] = INF;
            stack.pop();
            via.pop();
        }
    }
    false
}

fn simple_augment(g: &BipartiteGraph, order: &Ordering, m: &mut Matching) {
    let mut seen = vec![false; g.n_vars()];
    for &j in &order.eqs {
        if m.var_of(j).is_some() {
            continue;
        }
        seen.iter_mut().for_each(|s| *s = false);
        if let Some(path) = search_from_eq(m, j, &mut seen, &order.adj) {
            apply_path(m, &path);
        }
    }
}

/// DFS for an alternating path from exposed equation `root` to an exposed
/// variable. Returns the path as alternating nodes starting at `root`.
fn search_from_eq(
    m: &Matching,
    root: usize,
    seen: &mut [bool],
    adj: &[Vec<usize>],
) -> Option<Vec<Node>> {
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&mut (j, ref mut pos)) = stack.last_mut() {
        if *pos >= adj[j].len() {
            stack.pop();
            continue;
        }
        let i = adj[j][*pos];
        *pos += 1;
        if seen[i] {
            continue;
        }
        seen[i] = true;
        match m.eq_of(i) {
            None => {
                let mut path = Vec::with_capacity(stack.len() * 2);
                for &(eq, p) in &stack {
                    path.push(Node::Eq(eq));
                    path.push(Node::Var(adj[eq][p - 1]));
                }
                return Some(path);
            }
            Some(j2) => stack.push((j2, 0)),
        }
    }
    None
}

fn apply_path(m: &mut Matching, path: &[Node]) {
    for pair in path.chunks(2) {
        if let [a, b] = pair {
            let (i, j) = match (*a, *b) {
                (Node::Eq(j), Node::Var(i)) | (Node::Var(i), Node::Eq(j)) => (i, j),
                _ => unreachable!("paths alternate between node classes"),
            };
            m.set(i, j);
        }
    }
}

/// An augmenting path starting at the exposed node `from`: alternating
/// unmatched/matched edges ending at an exposed node of the other class.
/// `None` if `from` is matched or no such path exists.
pub fn find_augmenting_path(g: &BipartiteGraph, m: &Matching, from: Node) -> Option<Vec<Node>> {
    let adj: Vec<Vec<usize>> = (0..g.n_eqs()).map(|j| g.eq_neighbors(j).to_vec()).collect();
    match from {
        Node::Eq(j) => {
            if m.var_of(j).is_some() {
                return None;
            }
            let mut seen = vec![false; g.n_vars()];
            search_from_eq(m, j, &mut seen, &adj)
        }
        Node::Var(i) => {
            if m.eq_of(i).is_some() {
                return None;
            }
            // Walk var -> eq (unmatched edge) -> matched var, BFS with parents.
            let mut parent_eq: Vec<Option<usize>> = vec![None; g.n_eqs()];
            let mut queue = VecDeque::from([i]);
            let mut seen_var = vec![false; g.n_vars()];
            let mut var_parent: Vec<Option<usize>> = vec![None; g.n_vars()];
            seen_var[i] = true;
            while let Some(a) = queue.pop_front() {
                for &r in g.var_neighbors(a) {
                    if m.contains(a, r) || parent_eq[r].is_some() {
                        continue;
                    }
                    parent_eq[r] = Some(a);
                    match m.var_of(r) {
                        None => {
                            let mut path = vec![Node::Eq(r)];
                            let mut cur = a;
                            path.push(Node::Var(cur));
                            while let Some(prev_eq) = var_parent[cur] {
                                path.push(Node::Eq(prev_eq));
                                cur = parent_eq[prev_eq].expect("visited equation has a parent");
                                path.push(Node::Var(cur));
                            }
                            path.reverse();
                            return Some(path);
                        }
                        Some(b) if !seen_var[b] => {
                            seen_var[b] = true;
                            var_parent[b] = Some(r);
                            queue.push_back(b);
                        }
                        _ => {}
                    }
                }
            }
            None
        }
    }
}
