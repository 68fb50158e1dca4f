use std::collections::{BTreeMap, BTreeSet};

use crate::hier::ComponentDecomposition;
use crate::model::{ModelDef, ModelKind, VarRef};
use crate::system::EquationSystem;
use crate::varset::{ominus, Scope};

/// The reduced model of one definition: its own equations plus the
/// under-constrained parts of its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyModel {
    pub name: String,
    pub system: EquationSystem,
    /// Instance path each equation came from; empty for the model's own.
    pub provenance: Vec<String>,
}

/// Build the dummy model of `def` from decompositions of its direct
/// components, given as `(instance name, definition-level decomposition)`.
///
/// Components come first, then the model's own equations, mirroring the
/// flattening order. Occurrences of component variables that are not
/// imported are known quantities.
pub fn build_dummy(
    def: &ModelDef,
    kind: ModelKind,
    components: &[(&str, &ComponentDecomposition)],
) -> DummyModel {
    match kind {
        ModelKind::Nlae => build_dummy_nlae(def, components),
        ModelKind::Dae => build_dummy_dae(def, components),
    }
}

pub fn build_dummy_nlae(def: &ModelDef, components: &[(&str, &ComponentDecomposition)]) -> DummyModel {
    let mut variables: Vec<VarRef> = Vec::new();
    let mut equations = Vec::new();
    let mut provenance = Vec::new();
    for (inst, d) in components {
        let d = d.renamed(inst);
        variables.extend(d.under_vars);
        for e in d.under_eqs {
            equations.push(e);
            provenance.push(inst.to_string());
        }
    }
    variables.extend(def.variables.iter().map(VarRef::plain));
    for e in &def.equations {
        equations.push(e.clone());
        provenance.push(String::new());
    }
    let scope = Scope::of_bases(variables.iter().map(|v| v.base.clone()), 0);
    DummyModel {
        name: def.name.clone(),
        system: EquationSystem {
            kind: ModelKind::Nlae,
            variables,
            scope,
            equations,
            passive: BTreeSet::new(),
        },
        provenance,
    }
}

pub fn build_dummy_dae(def: &ModelDef, components: &[(&str, &ComponentDecomposition)]) -> DummyModel {
    let mut scope = Scope::new();
    let mut equations = Vec::new();
    let mut provenance = Vec::new();
    let mut imported = Vec::new();
    let mut removed = Vec::new();
    let mut passive = BTreeSet::new();
    for (inst, d) in components {
        let d = d.renamed(inst);
        passive.extend(d.passive);
        // Keep the component's highest orders so its equations need no
        // further differentiation unless the parent asks for more.
        let mut top: BTreeMap<&str, u32> = BTreeMap::new();
        for v in d.under_vars.iter().chain(&d.well_vars) {
            let t = top.entry(v.base.as_str()).or_insert(0);
            *t = (*t).max(v.order);
        }
        for v in &d.under_vars {
            scope.add_base(v.base.clone(), top[v.base.as_str()]);
        }
        for v in &d.well_vars {
            scope.remove_from(v);
        }
        imported.extend(d.under_vars.iter().cloned());
        removed.extend(d.well_vars.iter().cloned());
        for e in d.under_eqs {
            equations.push(e);
            provenance.push(inst.to_string());
        }
    }
    for v in &def.variables {
        scope.add_base(v.clone(), 1);
        imported.push(VarRef::plain(v.clone()));
    }
    for e in &def.equations {
        equations.push(e.clone());
        provenance.push(String::new());
    }
    let variables = ominus(
        &imported.into_iter().collect(),
        &removed.into_iter().collect(),
    )
    .into_iter()
    .collect();
    DummyModel {
        name: def.name.clone(),
        system: EquationSystem {
            kind: ModelKind::Dae,
            variables,
            scope,
            equations,
            passive,
        },
        provenance,
    }
}
