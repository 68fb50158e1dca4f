use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::ReductionError;
use crate::graph::{max_matching, BipartiteGraph, DirectedBipartite, Matching};
use crate::model::{qualify, Equation, ModelKind, VarRef};
use crate::reduction::{ss_matching, AugmentedSystem};
use crate::system::{solve, EquationSystem};
use crate::varset::Scope;

/// Under-constrained part of a graph as node indices, plus any exposed
/// equations (which mean the graph has an over-constrained part).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnderPart {
    pub vars: Vec<usize>,
    pub eqs: Vec<usize>,
    pub exposed_eqs: Vec<usize>,
}

/// Grow the exposed variables of `m` along length-two feasible paths until
/// nothing new is reached; the equations matched to the result complete the
/// under-constrained part.
pub fn under_closure(g: &BipartiteGraph, m: &Matching) -> UnderPart {
    let exposed_eqs = m.exposed_eqs();
    let start = m.exposed_vars();
    if start.is_empty() {
        return UnderPart {
            exposed_eqs,
            ..UnderPart::default()
        };
    }
    let d = DirectedBipartite::new(g, m);
    let mut in_set = vec![false; g.n_vars()];
    let mut queue = VecDeque::new();
    for &a in &start {
        in_set[a] = true;
        queue.push_back(a);
    }
    while let Some(a) = queue.pop_front() {
        for (_, _, b) in d.feasible_paths_len2(a) {
            if !in_set[b] {
                in_set[b] = true;
                queue.push_back(b);
            }
        }
    }
    let vars: Vec<usize> = (0..g.n_vars()).filter(|&i| in_set[i]).collect();
    let mut eqs: Vec<usize> = vars.iter().filter_map(|&i| m.eq_of(i)).collect();
    eqs.sort_unstable();
    UnderPart {
        vars,
        eqs,
        exposed_eqs,
    }
}

/// Under-constrained part of an NLAE component graph.
pub fn decompose_nlae(g: &BipartiteGraph) -> UnderPart {
    under_closure(g, &max_matching(g))
}

/// Under-constrained part of a DAE component, computed on its AUODE graph.
pub fn decompose_dae(
    equations: &[Equation],
    scope: &Scope,
    cap: u32,
) -> Result<(AugmentedSystem, UnderPart), ReductionError> {
    let sys = ss_matching(equations, scope, cap)?;
    let part = under_closure(&sys.graph, &sys.matching);
    Ok((sys, part))
}

/// What a parent needs to know about one component definition. Names are
/// local to the definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub def_name: String,
    pub kind: ModelKind,
    pub under_vars: Vec<VarRef>,
    /// Under-constrained equations with their full incidence.
    pub under_eqs: Vec<Equation>,
    /// Variables outside the under part; for DAEs these and their
    /// derivatives are known to the parent. DAE decompositions also carry
    /// the lowest known order of every base their own system inherited.
    pub well_vars: Vec<VarRef>,
    /// Non-empty when the component has an over-constrained part.
    pub over_equations: Vec<String>,
    /// Nonzero differentiation counts, including nested components.
    pub diff_counts: BTreeMap<String, u32>,
    /// Families among `under_eqs` whose highest copy lies in the well part.
    pub passive: Vec<String>,
}

impl ComponentDecomposition {
    pub fn over_empty(&self) -> bool {
        self.over_equations.is_empty()
    }

    /// Copy with every name qualified by an instance path.
    pub fn renamed(&self, prefix: &str) -> ComponentDecomposition {
        ComponentDecomposition {
            def_name: self.def_name.clone(),
            kind: self.kind,
            under_vars: self.under_vars.iter().map(|v| v.prefixed(prefix)).collect(),
            under_eqs: self.under_eqs.iter().map(|e| e.prefixed(prefix)).collect(),
            well_vars: self.well_vars.iter().map(|v| v.prefixed(prefix)).collect(),
            over_equations: self.over_equations.iter().map(|e| qualify(prefix, e)).collect(),
            diff_counts: self
                .diff_counts
                .iter()
                .map(|(k, n)| (qualify(prefix, k), *n))
                .collect(),
            passive: self.passive.iter().map(|e| qualify(prefix, e)).collect(),
        }
    }
}

/// Decompose the (dummy) equation system of definition `def_name`.
pub fn decompose_system(
    def_name: &str,
    sys: &EquationSystem,
    cap: u32,
) -> Result<ComponentDecomposition, ReductionError> {
    let solved = solve(sys, cap)?;
    let g = &solved.graph;
    let part = under_closure(g, &solved.matching);
    let mut over_equations: Vec<String> =
        part.exposed_eqs.iter().map(|&j| g.eq_name(j).to_string()).collect();
    for id in &solved.deficient {
        if !part.exposed_eqs.iter().any(|&j| &solved.equations[j].id == id) {
            over_equations.push(id.clone());
        }
    }
    let mut in_under = vec![false; g.n_vars()];
    for &i in &part.vars {
        in_under[i] = true;
    }
    let mut top: BTreeMap<&str, u32> = BTreeMap::new();
    for e in &solved.equations {
        let t = top.entry(e.id.as_str()).or_insert(0);
        *t = (*t).max(e.diff_count);
    }
    let under_eqs: Vec<&Equation> = part.eqs.iter().map(|&j| &solved.equations[j]).collect();
    let top_in_under: BTreeSet<&str> = under_eqs
        .iter()
        .filter(|e| e.diff_count == top[e.id.as_str()])
        .map(|e| e.id.as_str())
        .collect();
    let passive: BTreeSet<String> = under_eqs
        .iter()
        .filter(|e| sys.passive.contains(&e.id) || !top_in_under.contains(e.id.as_str()))
        .map(|e| e.id.clone())
        .collect();
    let mut well_vars: Vec<VarRef> = (0..g.n_vars())
        .filter(|&i| !in_under[i])
        .map(|i| g.var(i).clone())
        .collect();
    if sys.kind == ModelKind::Dae {
        // Orders already known in this system stay known for the parent.
        for (b, info) in sys.scope.bases() {
            if let Some(d) = info.removed_from {
                well_vars.push(VarRef::new(b.clone(), d));
            }
        }
    }
    Ok(ComponentDecomposition {
        def_name: def_name.to_string(),
        kind: sys.kind,
        under_vars: part.vars.iter().map(|&i| g.var(i).clone()).collect(),
        under_eqs: under_eqs.into_iter().cloned().collect(),
        well_vars,
        over_equations,
        diff_counts: solved
            .diff_log
            .into_iter()
            .filter(|(_, n)| *n > 0)
            .collect(),
        passive: passive.into_iter().collect(),
    })
}
