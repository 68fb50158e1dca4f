use std::collections::VecDeque;

use super::{max_matching, BipartiteGraph, Matching, Node};

/// Dulmage–Mendelsohn class of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Over,
    Under,
    Well,
}

/// Coarse Dulmage–Mendelsohn partition, independent of the maximum matching
/// used to compute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmPartition {
    pub var_part: Vec<Part>,
    pub eq_part: Vec<Part>,
}

impl DmPartition {
    fn select(parts: &[Part], p: Part) -> Vec<usize> {
        (0..parts.len()).filter(|&k| parts[k] == p).collect()
    }

    pub fn over_vars(&self) -> Vec<usize> {
        Self::select(&self.var_part, Part::Over)
    }

    pub fn over_eqs(&self) -> Vec<usize> {
        Self::select(&self.eq_part, Part::Over)
    }

    pub fn under_vars(&self) -> Vec<usize> {
        Self::select(&self.var_part, Part::Under)
    }

    pub fn under_eqs(&self) -> Vec<usize> {
        Self::select(&self.eq_part, Part::Under)
    }

    pub fn well_vars(&self) -> Vec<usize> {
        Self::select(&self.var_part, Part::Well)
    }

    pub fn well_eqs(&self) -> Vec<usize> {
        Self::select(&self.eq_part, Part::Well)
    }

    pub fn has_over(&self) -> bool {
        self.eq_part.contains(&Part::Over)
    }

    pub fn has_under(&self) -> bool {
        self.var_part.contains(&Part::Under)
    }

    pub fn is_well(&self) -> bool {
        !self.has_over() && !self.has_under()
    }
}

pub fn dm_decompose(g: &BipartiteGraph) -> DmPartition {
    dm_from_matching(g, &max_matching(g))
}

/// Partition from a maximum matching `m`: the over part is everything
/// reachable from exposed equations along alternating paths, the under part
/// everything reachable from exposed variables.
pub fn dm_from_matching(g: &BipartiteGraph, m: &Matching) -> DmPartition {
    let mut var_part = vec![Part::Well; g.n_vars()];
    let mut eq_part = vec![Part::Well; g.n_eqs()];

    let mut queue: VecDeque<usize> = m.exposed_eqs().into();
    for &j in &queue {
        eq_part[j] = Part::Over;
    }
    while let Some(j) = queue.pop_front() {
        for &i in g.eq_neighbors(j) {
            if var_part[i] == Part::Over {
                continue;
            }
            var_part[i] = Part::Over;
            let j2 = m.eq_of(i).expect("maximum matching has no augmenting path");
            if eq_part[j2] != Part::Over {
                eq_part[j2] = Part::Over;
                queue.push_back(j2);
            }
        }
    }

    let mut queue: VecDeque<usize> = m.exposed_vars().into();
    for &i in &queue {
        debug_assert_ne!(var_part[i], Part::Over);
        var_part[i] = Part::Under;
    }
    while let Some(i) = queue.pop_front() {
        for &j in g.var_neighbors(i) {
            if eq_part[j] == Part::Under {
                continue;
            }
            eq_part[j] = Part::Under;
            let i2 = m.var_of(j).expect("maximum matching has no augmenting path");
            if var_part[i2] != Part::Under {
                var_part[i2] = Part::Under;
                queue.push_back(i2);
            }
        }
    }
    DmPartition { var_part, eq_part }
}

/// A bipartite graph oriented by a matching: matched edges point from
/// equation to variable, unmatched edges from variable to equation.
#[derive(Debug, Clone, Copy)]
pub struct DirectedBipartite<'g> {
    pub graph: &'g BipartiteGraph,
    pub matching: &'g Matching,
}

impl<'g> DirectedBipartite<'g> {
    pub fn new(graph: &'g BipartiteGraph, matching: &'g Matching) -> Self {
        DirectedBipartite { graph, matching }
    }

    pub fn successors(&self, n: Node) -> Vec<Node> {
        match n {
            Node::Var(i) => self
                .graph
                .var_neighbors(i)
                .iter()
                .filter(|&&j| !self.matching.contains(i, j))
                .map(|&j| Node::Eq(j))
                .collect(),
            Node::Eq(j) => self.matching.var_of(j).map(Node::Var).into_iter().collect(),
        }
    }

    /// Directed paths `(a, r, b)` of length two starting at variable `a`:
    /// `r` shares an unmatched edge with `a` and is matched to `b`.
    pub fn feasible_paths_len2(&self, a: usize) -> Vec<(usize, usize, usize)> {
        self.graph
            .var_neighbors(a)
            .iter()
            .filter(|&&r| !self.matching.contains(a, r))
            .filter_map(|&r| self.matching.var_of(r).map(|b| (a, r, b)))
            .collect()
    }

    /// Variables reachable from `a` by directed paths of any length,
    /// excluding `a` itself.
    pub fn reachable_vars(&self, a: usize) -> Vec<usize> {
        let mut seen = vec![false; self.graph.n_vars()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            for (_, _, b) in self.feasible_paths_len2(x) {
                if !seen[b] {
                    seen[b] = true;
                    out.push(b);
                    queue.push_back(b);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{max_matching_with, MatchingOptions};

    #[test]
    fn isolated_nodes() {
        let g = BipartiteGraph::from_edges(1, 1, &[]);
        let dm = dm_decompose(&g);
        assert_eq!(dm.var_part, vec![Part::Under]);
        assert_eq!(dm.eq_part, vec![Part::Over]);
    }

    #[test]
    fn square_diagonal_is_well() {
        let g = BipartiteGraph::from_edges(3, 3, &[(0, 0), (1, 1), (2, 2), (0, 1)]);
        assert!(dm_decompose(&g).is_well());
    }

    #[test]
    fn independent_of_matching() {
        let edges = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (0, 3)];
        let g = BipartiteGraph::from_edges(4, 4, &edges);
        let base = dm_decompose(&g);
        for seed in 0..20 {
            let m = max_matching_with(&g, MatchingOptions { seed: Some(seed), ..Default::default() });
            assert_eq!(dm_from_matching(&g, &m), base);
        }
    }

    #[test]
    fn length_two_paths() {
        // v0 - e0 (matched), v0 - e1 (unmatched), e1 matched to v1.
        let g = BipartiteGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        let m = Matching::from_pairs(&g, &[(0, 0), (1, 1)]);
        let d = DirectedBipartite::new(&g, &m);
        assert_eq!(d.feasible_paths_len2(0), vec![(0, 1, 1)]);
        assert!(d.feasible_paths_len2(1).is_empty());
        assert_eq!(d.successors(Node::Eq(0)), vec![Node::Var(0)]);
        assert_eq!(d.reachable_vars(0), vec![1]);
    }
}
