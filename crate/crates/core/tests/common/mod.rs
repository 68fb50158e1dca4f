#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use hsa_core::gen::{generate_model, GenParams};
use hsa_core::graph::{dm_decompose, BipartiteGraph, Part};
use hsa_core::model::{Equation, ModelKind, Registry, VarRef};
use hsa_core::parse::parse_model;
use hsa_core::reduction::{differentiate_structurally, ss_matching};
use hsa_core::varset::Scope;

pub fn fixture(name: &str) -> Registry {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Equations of a seeded primary DAE model, which the generator keeps
/// over-free.
pub fn random_dae_component(seed: u64, n: usize) -> Vec<Equation> {
    let g = generate_model(&GenParams {
        kind: ModelKind::Dae,
        k: 0,
        levels: 0,
        n_per_component: n,
        r: 0.2,
        c0: 4.0,
        seed,
        ..GenParams::default()
    })
    .unwrap();
    g.registry.root_def().equations.clone()
}

pub fn dae_scope(equations: &[Equation]) -> Scope {
    Scope::of_bases(equations.iter().flat_map(|e| e.vars().map(|v| v.base.clone())), 1)
}

type NodeSet = BTreeSet<String>;

fn under_nodes(g: &BipartiteGraph) -> NodeSet {
    let dm = dm_decompose(g);
    let vars = dm.under_vars().into_iter().map(|i| g.var(i).to_string());
    let eqs = dm.under_eqs().into_iter().map(|j| g.eq_name(j).to_string());
    vars.chain(eqs).collect()
}

/// Under nodes of the AUODE graph before and after every well equation is
/// differentiated once more and the new copies are added.
pub fn under_before_and_after_well_differentiation(eqs: &[Equation], scope: &Scope) -> (NodeSet, NodeSet) {
    let sys = ss_matching(eqs, scope, 20).unwrap();
    let g = &sys.graph;
    let before = under_nodes(g);
    let dm = dm_decompose(g);
    assert!(!dm.has_over(), "component must be over-free");

    let mut equations = sys.equations.clone();
    let mut names: BTreeSet<String> = equations.iter().map(Equation::name).collect();
    for j in 0..g.n_eqs() {
        if dm.eq_part[j] == Part::Well {
            let d = differentiate_structurally(&sys.equations[j], 40).unwrap();
            if names.insert(d.name()) {
                equations.push(d);
            }
        }
    }
    let mut vars: BTreeSet<VarRef> = g.vars().iter().cloned().collect();
    for e in &equations {
        vars.extend(e.vars().filter(|v| scope.is_unknown(v)).cloned());
    }
    let after = under_nodes(&BipartiteGraph::build(&equations, vars));
    (before, after)
}
