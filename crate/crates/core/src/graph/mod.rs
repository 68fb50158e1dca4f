//! Bipartite incidence graphs, maximum matchings and the Dulmage–Mendelsohn
//! decomposition.
//!
//! Variable and equation nodes live in separate index spaces. A graph is
//! immutable once built; matchings are separate values over the same
//! indices.

mod dm;
mod dot;
mod enumerate;
mod matching;

use std::collections::HashMap;

use crate::model::{Equation, VarRef};

pub use dm::{dm_decompose, dm_from_matching, DirectedBipartite, DmPartition, Part};
pub use dot::graph_to_dot;
pub use enumerate::{dm_by_enumeration, enumerate_max_matchings, DEFAULT_ORACLE_BOUND};
pub use matching::{
    extend_to_maximum, find_augmenting_path, max_matching, max_matching_with, MatchingAlgorithm,
    MatchingOptions,
};

/// A node of either class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(usize),
    Eq(usize),
}

#[derive(Debug, Clone, Default)]
pub struct BipartiteGraph {
    vars: Vec<VarRef>,
    var_index: HashMap<VarRef, usize>,
    eqs: Vec<String>,
    eq_adj: Vec<Vec<usize>>,
    var_adj: Vec<Vec<usize>>,
    n_edges: usize,
}

impl BipartiteGraph {
    /// One variable node per entry of `vars` (duplicates collapse), one
    /// equation node per equation, one edge per occurrence whose variable is
    /// a node. Occurrences of other variables are treated as known.
    pub fn build<I>(equations: &[Equation], vars: I) -> Self
    where
        I: IntoIterator<Item = VarRef>,
    {
        let mut g = BipartiteGraph::default();
        for v in vars {
            g.add_var(v);
        }
        for e in equations {
            let j = g.add_eq(e.name());
            for occ in &e.occurrences {
                if let Some(&i) = g.var_index.get(&occ.var) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Graph with synthetic names `v0..`, `e0..` from an edge list of
    /// `(var, eq)` index pairs.
    pub fn from_edges(n_vars: usize, n_eqs: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = BipartiteGraph::default();
        for i in 0..n_vars {
            g.add_var(VarRef::plain(format!("v{i}")));
        }
        for j in 0..n_eqs {
            g.add_eq(format!("e{j}"));
        }
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub(crate) fn add_var(&mut self, v: VarRef) -> usize {
        if let Some(&i) = self.var_index.get(&v) {
            return i;
        }
        let i = self.vars.len();
        self.var_index.insert(v.clone(), i);
        self.vars.push(v);
        self.var_adj.push(Vec::new());
        i
    }

    pub(crate) fn add_eq(&mut self, name: String) -> usize {
        let j = self.eqs.len();
        self.eqs.push(name);
        self.eq_adj.push(Vec::new());
        j
    }

    /// Adds the edge unless present.
    pub(crate) fn add_edge(&mut self, var: usize, eq: usize) -> bool {
        if self.eq_adj[eq].contains(&var) {
            return false;
        }
        self.eq_adj[eq].push(var);
        self.var_adj[var].push(eq);
        self.n_edges += 1;
        true
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_eqs(&self) -> usize {
        self.eqs.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn n_nodes(&self) -> usize {
        self.vars.len() + self.eqs.len()
    }

    pub fn var(&self, i: usize) -> &VarRef {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[VarRef] {
        &self.vars
    }

    pub fn eq_name(&self, j: usize) -> &str {
        &self.eqs[j]
    }

    pub fn eq_names(&self) -> &[String] {
        &self.eqs
    }

    pub fn var_id(&self, v: &VarRef) -> Option<usize> {
        self.var_index.get(v).copied()
    }

    pub fn eq_id(&self, name: &str) -> Option<usize> {
        self.eqs.iter().position(|e| e == name)
    }

    /// Variables of equation `j`.
    pub fn eq_neighbors(&self, j: usize) -> &[usize] {
        &self.eq_adj[j]
    }

    /// Equations containing variable `i`.
    pub fn var_neighbors(&self, i: usize) -> &[usize] {
        &self.var_adj[i]
    }

    pub fn has_edge(&self, var: usize, eq: usize) -> bool {
        self.eq_adj[eq].contains(&var)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.eq_adj
            .iter()
            .enumerate()
            .flat_map(|(j, vs)| vs.iter().map(move |&i| (i, j)))
    }

    pub fn node_name(&self, n: Node) -> String {
        match n {
            Node::Var(i) => self.vars[i].to_string(),
            Node::Eq(j) => self.eqs[j].clone(),
        }
    }
}

/// A set of edges without common nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    var_to_eq: Vec<Option<usize>>,
    eq_to_var: Vec<Option<usize>>,
    size: usize,
}

impl Matching {
    pub fn empty(g: &BipartiteGraph) -> Self {
        Matching {
            var_to_eq: vec![None; g.n_vars()],
            eq_to_var: vec![None; g.n_eqs()],
            size: 0,
        }
    }

    /// Build from `(var, eq)` pairs. Panics if a node is used twice.
    pub fn from_pairs(g: &BipartiteGraph, pairs: &[(usize, usize)]) -> Self {
        let mut m = Matching::empty(g);
        for &(i, j) in pairs {
            assert!(
                m.var_to_eq[i].is_none() && m.eq_to_var[j].is_none(),
                "node matched twice"
            );
            m.set(i, j);
        }
        m
    }

    /// Match `var` with `eq`, dropping any pair either node was part of.
    pub(crate) fn set(&mut self, var: usize, eq: usize) {
        if let Some(old_eq) = self.var_to_eq[var].take() {
            self.eq_to_var[old_eq] = None;
            self.size -= 1;
        }
        if let Some(old_var) = self.eq_to_var[eq].take() {
            self.var_to_eq[old_var] = None;
            self.size -= 1;
        }
        self.size += 1;
        self.var_to_eq[var] = Some(eq);
        self.eq_to_var[eq] = Some(var);
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eq_of(&self, var: usize) -> Option<usize> {
        self.var_to_eq[var]
    }

    pub fn var_of(&self, eq: usize) -> Option<usize> {
        self.eq_to_var[eq]
    }

    pub fn contains(&self, var: usize, eq: usize) -> bool {
        self.var_to_eq[var] == Some(eq)
    }

    /// `(var, eq)` pairs ordered by equation index.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.eq_to_var
            .iter()
            .enumerate()
            .filter_map(|(j, v)| v.map(|i| (i, j)))
            .collect()
    }

    pub fn exposed_vars(&self) -> Vec<usize> {
        (0..self.var_to_eq.len())
            .filter(|&i| self.var_to_eq[i].is_none())
            .collect()
    }

    pub fn exposed_eqs(&self) -> Vec<usize> {
        (0..self.eq_to_var.len())
            .filter(|&j| self.eq_to_var[j].is_none())
            .collect()
    }

    pub fn is_perfect(&self) -> bool {
        self.size == self.var_to_eq.len() && self.size == self.eq_to_var.len()
    }

    /// Pairs are edges of `g` and no node is covered twice.
    pub fn is_valid(&self, g: &BipartiteGraph) -> bool {
        if self.var_to_eq.len() != g.n_vars() || self.eq_to_var.len() != g.n_eqs() {
            return false;
        }
        let mut count = 0;
        for (j, v) in self.eq_to_var.iter().enumerate() {
            if let Some(i) = *v {
                if self.var_to_eq[i] != Some(j) || !g.has_edge(i, j) {
                    return false;
                }
                count += 1;
            }
        }
        let back = self.var_to_eq.iter().filter(|e| e.is_some()).count();
        count == back && count == self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Occurrence;

    #[test]
    fn build_drops_unknown_occurrences() {
        let e6 = Equation::over_vars("e6", &["v4", "v5", "v6"]);
        let g = BipartiteGraph::build(&[e6], [VarRef::plain("v5"), VarRef::plain("v6")]);
        assert_eq!(g.n_vars(), 2);
        assert_eq!(g.eq_neighbors(0).len(), 2);
    }

    #[test]
    fn empty_graph() {
        let g = BipartiteGraph::build(&[], std::iter::empty());
        assert_eq!((g.n_vars(), g.n_eqs(), g.n_edges()), (0, 0, 0));
    }

    #[test]
    fn derivative_orders_are_separate_nodes() {
        let e = Equation::new(
            "e",
            vec![
                Occurrence::new(VarRef::new("x", 0)),
                Occurrence::new(VarRef::new("x", 1)),
            ],
        );
        let g = BipartiteGraph::build(&[e], [VarRef::new("x", 0), VarRef::new("x", 1)]);
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = BipartiteGraph::from_edges(2, 1, &[(0, 0), (0, 0), (1, 0)]);
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn matching_validity() {
        let g = BipartiteGraph::from_edges(2, 2, &[(0, 0), (1, 1)]);
        let m = Matching::from_pairs(&g, &[(0, 0), (1, 1)]);
        assert!(m.is_valid(&g) && m.is_perfect());
        let bad = Matching::from_pairs(&g, &[(0, 1)]);
        assert!(!bad.is_valid(&g));
    }
}
