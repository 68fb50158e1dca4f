//! Brute-force reference computations for small graphs. Nothing here uses
//! augmenting paths, so the results can check the fast algorithms.

use super::{BipartiteGraph, DmPartition, Matching, Part};
use crate::error::OracleError;

/// Largest graph (variables plus equations) the oracle accepts by default.
pub const DEFAULT_ORACLE_BOUND: usize = 24;

fn check_bound(g: &BipartiteGraph, bound: usize) -> Result<(), OracleError> {
    if g.n_nodes() > bound {
        Err(OracleError::BoundExceeded {
            nodes: g.n_nodes(),
            bound,
        })
    } else {
        Ok(())
    }
}

/// Size of a maximum matching, by exhaustive search.
fn brute_max_size(g: &BipartiteGraph) -> usize {
    fn go(g: &BipartiteGraph, j: usize, used: &mut [bool], size: usize, best: &mut usize) {
        if size + (g.n_eqs() - j) <= *best {
            return;
        }
        if j == g.n_eqs() {
            *best = size;
            return;
        }
        for &i in g.eq_neighbors(j) {
            if !used[i] {
                used[i] = true;
                go(g, j + 1, used, size + 1, best);
                used[i] = false;
            }
        }
        go(g, j + 1, used, size, best);
    }
    let mut best = 0;
    go(g, 0, &mut vec![false; g.n_vars()], 0, &mut best);
    best
}

/// Calls `visit` once per maximum matching, given as `(var, eq)` pairs.
fn for_each_max_matching(g: &BipartiteGraph, mut visit: impl FnMut(&[(usize, usize)])) {
    fn go(
        g: &BipartiteGraph,
        j: usize,
        target: usize,
        used: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        if pairs.len() + (g.n_eqs() - j) < target {
            return;
        }
        if j == g.n_eqs() {
            visit(pairs);
            return;
        }
        for &i in g.eq_neighbors(j) {
            if !used[i] {
                used[i] = true;
                pairs.push((i, j));
                go(g, j + 1, target, used, pairs, visit);
                pairs.pop();
                used[i] = false;
            }
        }
        go(g, j + 1, target, used, pairs, visit);
    }
    let target = brute_max_size(g);
    let mut used = vec![false; g.n_vars()];
    go(g, 0, target, &mut used, &mut Vec::new(), &mut visit);
}

/// Every maximum matching of `g`.
pub fn enumerate_max_matchings(
    g: &BipartiteGraph,
    bound: usize,
) -> Result<Vec<Matching>, OracleError> {
    check_bound(g, bound)?;
    let mut out = Vec::new();
    for_each_max_matching(g, |pairs| out.push(Matching::from_pairs(g, pairs)));
    Ok(out)
}

/// The partition by its definition: over equations are those left exposed by
/// some maximum matching, over variables their neighbours; dually for the
/// under part. Everything else is well-constrained.
pub fn dm_by_enumeration(g: &BipartiteGraph, bound: usize) -> Result<DmPartition, OracleError> {
    check_bound(g, bound)?;
    let mut eq_exposed = vec![false; g.n_eqs()];
    let mut var_exposed = vec![false; g.n_vars()];
    for_each_max_matching(g, |pairs| {
        let mut eq_cov = vec![false; g.n_eqs()];
        let mut var_cov = vec![false; g.n_vars()];
        for &(i, j) in pairs {
            var_cov[i] = true;
            eq_cov[j] = true;
        }
        for (j, c) in eq_cov.iter().enumerate() {
            eq_exposed[j] |= !c;
        }
        for (i, c) in var_cov.iter().enumerate() {
            var_exposed[i] |= !c;
        }
    });
    let mut var_part = vec![Part::Well; g.n_vars()];
    let mut eq_part = vec![Part::Well; g.n_eqs()];
    for j in 0..g.n_eqs() {
        if eq_exposed[j] {
            eq_part[j] = Part::Over;
            for &i in g.eq_neighbors(j) {
                var_part[i] = Part::Over;
            }
        }
    }
    for i in 0..g.n_vars() {
        if var_exposed[i] {
            var_part[i] = Part::Under;
            for &j in g.var_neighbors(i) {
                eq_part[j] = Part::Under;
            }
        }
    }
    Ok(DmPartition { var_part, eq_part })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_matchings_of_complete_graph() {
        let edges: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let g = BipartiteGraph::from_edges(3, 3, &edges);
        assert_eq!(enumerate_max_matchings(&g, 24).unwrap().len(), 6);
    }

    #[test]
    fn rejects_large_graphs() {
        let g = BipartiteGraph::from_edges(13, 12, &[]);
        assert!(matches!(
            enumerate_max_matchings(&g, 24),
            Err(OracleError::BoundExceeded { nodes: 25, bound: 24 })
        ));
    }

    #[test]
    fn star_is_over_constrained() {
        // One variable, three equations.
        let g = BipartiteGraph::from_edges(1, 3, &[(0, 0), (0, 1), (0, 2)]);
        let dm = dm_by_enumeration(&g, 24).unwrap();
        assert_eq!(dm.eq_part, vec![Part::Over; 3]);
        assert_eq!(dm.var_part, vec![Part::Over]);
    }
}
