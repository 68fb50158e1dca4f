//! A single (non-hierarchical) equation system and its structural solution,
//! shared by the flat and the hierarchical paths.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ReductionError;
use crate::flatten::FlatModel;
use crate::graph::{
    dm_from_matching, max_matching, BipartiteGraph, DirectedBipartite, DmPartition, Matching, Part,
};
use crate::model::{Equation, ModelKind, VarRef};
use crate::reduction::ss_matching_with;
use crate::report::{AnalysisReport, InitSuggestion, Mode, NodeSets};
use crate::varset::Scope;

/// Equations over a set of unknowns. For NLAE systems `variables` are the
/// graph's variable nodes; for DAE systems `scope` decides which derivative
/// orders are unknown and `variables` only lists the declared unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub kind: ModelKind,
    pub variables: Vec<VarRef>,
    pub scope: Scope,
    pub equations: Vec<Equation>,
    /// DAE families reduced inside a component whose highest copy is known
    /// here; only their lower copies are present.
    pub passive: BTreeSet<String>,
}

impl EquationSystem {
    pub fn from_flat(f: &FlatModel) -> Self {
        let floor = match f.kind {
            ModelKind::Nlae => 0,
            ModelKind::Dae => 1,
        };
        EquationSystem {
            kind: f.kind,
            variables: f.variables.iter().map(VarRef::plain).collect(),
            scope: Scope::of_bases(f.variables.iter().cloned(), floor),
            equations: f.equations.clone(),
            passive: BTreeSet::new(),
        }
    }

    /// Incidence graph of the equations as given, without augmentation.
    pub fn graph(&self) -> BipartiteGraph {
        BipartiteGraph::build(&self.equations, self.variables.iter().cloned())
    }
}

/// The graph analysed for singularity (the AUODE graph for DAEs) with a
/// maximum matching.
#[derive(Debug, Clone)]
pub struct SolvedSystem {
    pub kind: ModelKind,
    pub graph: BipartiteGraph,
    pub matching: Matching,
    pub equations: Vec<Equation>,
    pub diff_log: BTreeMap<String, u32>,
    pub deficient: Vec<String>,
}

impl SolvedSystem {
    pub fn partition(&self) -> DmPartition {
        dm_from_matching(&self.graph, &self.matching)
    }
}

pub fn solve(sys: &EquationSystem, cap: u32) -> Result<SolvedSystem, ReductionError> {
    match sys.kind {
        ModelKind::Nlae => {
            let graph = sys.graph();
            let matching = max_matching(&graph);
            Ok(SolvedSystem {
                kind: sys.kind,
                graph,
                matching,
                equations: sys.equations.clone(),
                diff_log: sys.equations.iter().map(|e| (e.id.clone(), e.diff_count)).collect(),
                deficient: Vec::new(),
            })
        }
        ModelKind::Dae => {
            let aug = ss_matching_with(&sys.equations, &sys.scope, &sys.passive, cap)?;
            Ok(SolvedSystem {
                kind: sys.kind,
                graph: aug.graph,
                matching: aug.matching,
                equations: aug.equations,
                diff_log: aug.diff_log,
                deficient: aug.deficient,
            })
        }
    }
}

fn names(g: &BipartiteGraph, parts: &[Part], p: Part, var: bool) -> Vec<String> {
    parts
        .iter()
        .enumerate()
        .filter(|(_, q)| **q == p)
        .map(|(k, _)| {
            if var {
                g.var(k).to_string()
            } else {
                g.eq_name(k).to_string()
            }
        })
        .collect()
}

/// Classify a solved system and render the report body. Timings and
/// provenance-specific fields are left for the caller.
pub fn report_for(model: &str, mode: Mode, s: &SolvedSystem) -> AnalysisReport {
    let g = &s.graph;
    let dm = s.partition();
    let mut over_equations = names(g, &dm.eq_part, Part::Over, false);
    for id in &s.deficient {
        // The active copy of a deficient family is reported even if a
        // maximum matching happens to cover it.
        if let Some(e) = s.equations.iter().filter(|e| &e.id == id).max_by_key(|e| e.diff_count) {
            let n = e.name();
            if !over_equations.contains(&n) {
                over_equations.push(n);
            }
        }
    }
    let singular = match s.kind {
        ModelKind::Nlae => !s.matching.is_perfect(),
        ModelKind::Dae => !over_equations.is_empty(),
    };
    let exposed = s.matching.exposed_vars();
    let init_suggestions = match s.kind {
        ModelKind::Nlae => Vec::new(),
        ModelKind::Dae => {
            let d = DirectedBipartite::new(g, &s.matching);
            exposed
                .iter()
                .map(|&a| InitSuggestion {
                    variable: g.var(a).to_string(),
                    alternatives: d.reachable_vars(a).iter().map(|&b| g.var(b).to_string()).collect(),
                })
                .collect()
        }
    };
    let well = NodeSets {
        variables: names(g, &dm.var_part, Part::Well, true),
        equations: names(g, &dm.eq_part, Part::Well, false),
    };
    AnalysisReport {
        model: model.to_string(),
        mode,
        kind: s.kind,
        singular,
        over_equations,
        over_variables: names(g, &dm.var_part, Part::Over, true),
        exposed_variables: exposed.iter().map(|&i| g.var(i).to_string()).collect(),
        under: NodeSets {
            variables: names(g, &dm.var_part, Part::Under, true),
            equations: names(g, &dm.eq_part, Part::Under, false),
        },
        well_count: well.variables.len() + well.equations.len(),
        well,
        init_suggestions,
        diff_counts: s
            .diff_log
            .iter()
            .filter(|(_, n)| **n > 0)
            .map(|(k, n)| (k.clone(), *n))
            .collect(),
        localized_over: Vec::new(),
        timings_ms: BTreeMap::new(),
    }
}
