//! Structural differentiation and Pantelides-style augmentation of DAE
//! equation sets into the augmented underlying-ODE (AUODE) graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use crate::error::ReductionError;
use crate::graph::{
    dm_decompose, extend_to_maximum, graph_to_dot, BipartiteGraph, Matching, MatchingOptions,
};
use crate::model::{Equation, Occurrence, VarRef};
use crate::varset::Scope;

/// Differentiate `e` once with respect to time.
///
/// Each occurrence `(v, d)` contributes `(v, d+1)` and, unless it is linear
/// with a time-invariant coefficient, also keeps `(v, d)`.
pub fn differentiate_structurally(e: &Equation, cap: u32) -> Result<Equation, ReductionError> {
    let mut out: Vec<Occurrence> = Vec::with_capacity(e.occurrences.len() * 2);
    let mut push = |occ: Occurrence| match out.iter_mut().find(|o| o.var == occ.var) {
        Some(o) => o.linear_ti &= occ.linear_ti,
        None => out.push(occ),
    };
    for occ in &e.occurrences {
        if occ.var.order + 1 > cap {
            return Err(ReductionError::DerivativeCap {
                cap,
                chain: vec![e.name()],
            });
        }
        if !occ.linear_ti {
            push(Occurrence::new(occ.var.clone()));
        }
        push(Occurrence {
            var: occ.var.derivative(),
            linear_ti: occ.linear_ti,
        });
    }
    Ok(Equation {
        id: e.id.clone(),
        occurrences: out,
        diff_count: e.diff_count + 1,
    })
}

/// Result of index reduction: every equation copy, the AUODE graph over them
/// and a maximum matching of it.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    /// Original equations followed, per equation, by their differentiated
    /// copies.
    pub equations: Vec<Equation>,
    pub graph: BipartiteGraph,
    pub matching: Matching,
    /// Number of differentiations per original equation id.
    pub diff_log: BTreeMap<String, u32>,
    /// Equations that no amount of differentiation can match.
    pub deficient: Vec<String>,
    /// Highest derivative order of each variable base in the scope.
    pub highest: BTreeMap<String, u32>,
}

impl AugmentedSystem {
    pub fn to_dot(&self) -> String {
        graph_to_dot(&self.graph, Some(&self.matching), None)
    }

    /// Plain-text table of differentiation counts.
    pub fn diff_table(&self) -> String {
        let width = self.diff_log.keys().map(|k| k.len()).max().unwrap_or(8).max(8);
        let mut s = format!("{:<width$}  count\n", "equation");
        for (id, n) in &self.diff_log {
            let _ = writeln!(s, "{id:<width$}  {n}");
        }
        s
    }
}

struct Family {
    copies: Vec<Equation>,
}

impl Family {
    fn active(&self) -> &Equation {
        self.copies.last().expect("family has its original equation")
    }
}

struct Pantelides<'a> {
    scope: &'a Scope,
    families: Vec<Family>,
    highest: BTreeMap<String, u32>,
    assign: HashMap<VarRef, usize>,
    cap: u32,
}

impl Pantelides<'_> {
    fn is_candidate(&self, v: &VarRef) -> bool {
        self.scope.is_unknown(v) && self.highest.get(&v.base) == Some(&v.order)
    }

    fn candidates(&self, k: usize) -> Vec<VarRef> {
        self.families[k]
            .active()
            .vars()
            .filter(|v| self.is_candidate(v))
            .cloned()
            .collect()
    }

    /// Alternating-path search from family `root`. On failure returns the
    /// coloured families and variables.
    fn augment(&mut self, root: usize) -> Result<(), (Vec<usize>, Vec<VarRef>)> {
        let mut coloured_eqs = vec![root];
        let mut coloured_vars: Vec<VarRef> = Vec::new();
        let mut seen_eq = vec![false; self.families.len()];
        seen_eq[root] = true;
        // Entries are (family, its candidates, next candidate); via[k] leads from level k to k + 1.
        let mut stack: Vec<(usize, Vec<VarRef>, usize)> = Vec::new();
        let mut via: Vec<VarRef> = Vec::new();

        let start = self.candidates(root);
        if let Some(v) = start.iter().find(|v| !self.assign.contains_key(*v)) {
            self.assign.insert(v.clone(), root);
            return Ok(());
        }
        stack.push((root, start, 0));
        while let Some((_, cands, pos)) = stack.last_mut() {
            if *pos >= cands.len() {
                stack.pop();
                via.pop();
                continue;
            }
            let v = cands[*pos].clone();
            *pos += 1;
            if coloured_vars.contains(&v) {
                continue;
            }
            coloured_vars.push(v.clone());
            let next = self.assign[&v];
            if seen_eq[next] {
                continue;
            }
            seen_eq[next] = true;
            coloured_eqs.push(next);
            let cands = self.candidates(next);
            if let Some(free) = cands.iter().find(|w| !self.assign.contains_key(*w)).cloned() {
                // Shift assignments along the path.
                via.push(v);
                self.assign.insert(free, next);
                for (level, (fam, _, _)) in stack.iter().enumerate() {
                    self.assign.insert(via[level].clone(), *fam);
                }
                return Ok(());
            }
            via.push(v);
            stack.push((next, cands, 0));
        }
        Err((coloured_eqs, coloured_vars))
    }

    fn run(&mut self, order: &[usize]) -> Result<(), ReductionError> {
        for &k in order {
            loop {
                match self.augment(k) {
                    Ok(()) => break,
                    Err((eqs, vars)) => {
                        for &f in &eqs {
                            let next = differentiate_structurally(self.families[f].active(), self.cap)
                                .map_err(|_| ReductionError::DerivativeCap {
                                    cap: self.cap,
                                    chain: eqs.iter().map(|&f| self.families[f].active().name()).collect(),
                                })?;
                            self.families[f].copies.push(next);
                        }
                        for v in vars {
                            let fam = self.assign.remove(&v);
                            let up = v.derivative();
                            if up.order > self.cap {
                                return Err(ReductionError::DerivativeCap {
                                    cap: self.cap,
                                    chain: vec![up.to_string()],
                                });
                            }
                            self.highest.insert(v.base.clone(), up.order);
                            if let Some(f) = fam {
                                self.assign.insert(up, f);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Group equation copies by id, in order of first appearance, lowest
/// differentiation first. Only the highest copy of a family takes part in
/// the matching; lower copies stay in the system as they are.
fn group_families(equations: &[Equation]) -> Vec<Family> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut families: Vec<Family> = Vec::new();
    for e in equations {
        match index.get(e.id.as_str()) {
            Some(&k) => families[k].copies.push(e.clone()),
            None => {
                index.insert(e.id.as_str(), families.len());
                families.push(Family {
                    copies: vec![e.clone()],
                });
            }
        }
    }
    for f in &mut families {
        f.copies.sort_by_key(|e| e.diff_count);
        f.copies.dedup_by_key(|e| e.diff_count);
    }
    families
}

/// Families whose equations can never be matched, whatever their derivative
/// orders: the over part of the graph that merges all orders of a base.
fn deficient_families(equations: &[Equation], scope: &Scope) -> Vec<bool> {
    let mut g = BipartiteGraph::default();
    let mut base_ids: HashMap<&str, usize> = HashMap::new();
    for (b, _) in scope.bases() {
        if scope.is_fully_unknown(b) {
            let id = g.add_var(VarRef::plain(b.clone()));
            base_ids.insert(b.as_str(), id);
        }
    }
    for e in equations {
        let j = g.add_eq(e.id.clone());
        for v in e.vars() {
            if let Some(&i) = base_ids.get(v.base.as_str()) {
                g.add_edge(i, j);
            }
        }
    }
    let dm = dm_decompose(&g);
    dm.eq_part
        .iter()
        .map(|p| *p == crate::graph::Part::Over)
        .collect()
}

/// Augment `equations` until every equation is matched to a highest-order
/// derivative, differentiating equations along blocked alternating paths.
///
/// Unknowns are the orders the scope marks unknown; every base needs at
/// least its floor order as highest derivative.
pub fn ss_matching(
    equations: &[Equation],
    scope: &Scope,
    cap: u32,
) -> Result<AugmentedSystem, ReductionError> {
    ss_matching_with(equations, scope, &BTreeSet::new(), cap)
}

/// As [`ss_matching`], with `passive` naming families that were already
/// reduced elsewhere and whose highest copy is not part of `equations`.
/// Their copies enter the final graph but are never matched to a highest
/// derivative, differentiated or logged.
pub fn ss_matching_with(
    equations: &[Equation],
    scope: &Scope,
    passive: &BTreeSet<String>,
    cap: u32,
) -> Result<AugmentedSystem, ReductionError> {
    let mut highest: BTreeMap<String, u32> = scope
        .bases()
        .map(|(b, info)| (b.clone(), info.floor))
        .collect();
    for e in equations {
        for v in e.vars() {
            if let Some(h) = highest.get_mut(&v.base) {
                *h = (*h).max(v.order);
            }
        }
    }
    let families = group_families(equations);
    let is_passive: Vec<bool> = families.iter().map(|f| passive.contains(&f.copies[0].id)).collect();
    let active: Vec<Equation> = families
        .iter()
        .zip(&is_passive)
        .filter(|(_, p)| !**p)
        .map(|(f, _)| f.active().clone())
        .collect();
    let mut deficient = vec![false; families.len()];
    let mut found = deficient_families(&active, scope).into_iter();
    for (d, p) in deficient.iter_mut().zip(&is_passive) {
        if !p {
            *d = found.next().expect("one flag per active family");
        }
    }
    let mut p = Pantelides {
        scope,
        families,
        highest,
        assign: HashMap::new(),
        cap,
    };
    let order: Vec<usize> = (0..p.families.len())
        .filter(|&k| !deficient[k] && !is_passive[k])
        .collect();
    p.run(&order)?;

    let mut g = BipartiteGraph::default();
    for (b, &h) in &p.highest {
        for d in 0..=h {
            let v = VarRef::new(b.clone(), d);
            if scope.is_unknown(&v) {
                g.add_var(v);
            }
        }
    }
    let mut all = Vec::new();
    let mut active_index = Vec::with_capacity(p.families.len());
    for f in &p.families {
        for e in &f.copies {
            all.push(e.clone());
        }
        active_index.push(all.len() - 1);
    }
    for e in &all {
        let j = g.add_eq(e.name());
        for v in e.vars() {
            if let Some(i) = g.var_id(v) {
                g.add_edge(i, j);
            }
        }
    }
    let mut seed = Matching::empty(&g);
    for (v, &f) in &p.assign {
        let i = g.var_id(v).expect("assigned variable is a node");
        seed.set(i, active_index[f]);
    }
    let matching = extend_to_maximum(&g, seed, MatchingOptions::default());
    let diff_log = p
        .families
        .iter()
        .zip(&is_passive)
        .filter(|(_, p)| !**p)
        .map(|(f, _)| (f.copies[0].id.clone(), f.active().diff_count))
        .collect();
    let deficient = p
        .families
        .iter()
        .zip(&deficient)
        .filter(|(_, d)| **d)
        .map(|(f, _)| f.copies[0].id.clone())
        .collect();
    Ok(AugmentedSystem {
        equations: all,
        graph: g,
        matching,
        diff_log,
        deficient,
        highest: p.highest,
    })
}
