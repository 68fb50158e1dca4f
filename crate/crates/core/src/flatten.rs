//! Flattening of hierarchical models into a single equation system.

use std::collections::BTreeMap;

use crate::model::{qualify, ComponentInstance, Equation, ModelDef, ModelKind, Registry};

/// The flattened form `(Ā, ∅, R̄)` of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatModel {
    pub name: String,
    pub kind: ModelKind,
    /// Qualified variable bases.
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
}

impl FlatModel {
    /// View the flat model as a primary model definition.
    pub fn to_def(&self) -> ModelDef {
        ModelDef {
            name: self.name.clone(),
            kind: self.kind,
            variables: self.variables.clone(),
            components: Vec::new(),
            equations: self.equations.clone(),
        }
    }
}

/// Flatten `m`. Every symbol owned by a component is prefixed with its
/// instance path, so each instance contributes its own nodes. Component
/// contents are emitted before the owner's (post-order).
pub fn flatten(m: &ModelDef, registry: &Registry) -> FlatModel {
    let mut out = FlatModel {
        name: m.name.clone(),
        kind: m.kind,
        variables: Vec::new(),
        equations: Vec::new(),
    };
    collect(m, registry, "", &mut out);
    out
}

fn collect(m: &ModelDef, registry: &Registry, prefix: &str, out: &mut FlatModel) {
    for c in &m.components {
        let def = &registry.defs[&c.def_name];
        collect(def, registry, &qualify(prefix, &c.instance_name), out);
    }
    out.variables
        .extend(m.variables.iter().map(|v| qualify(prefix, v)));
    out.equations
        .extend(m.equations.iter().map(|e| e.prefixed(prefix)));
}

/// Hierarchy depth: 0 for primary models, otherwise one more than the
/// deepest component.
pub fn level_of(m: &ModelDef, registry: &Registry) -> usize {
    m.components
        .iter()
        .map(|c| 1 + level_of(&registry.defs[&c.def_name], registry))
        .max()
        .unwrap_or(0)
}

/// Replace every direct component of the root by its flattened form, giving
/// an equivalent first-level model. Definitions are shared per component
/// definition, as in the original.
pub fn flatten_components(registry: &Registry) -> Registry {
    let root = registry.root_def();
    let mut defs = BTreeMap::new();
    let mut new_root = root.clone();
    new_root.components.clear();
    for c in &root.components {
        let flat_name = format!("{}__flat", c.def_name);
        if !defs.contains_key(&flat_name) {
            let mut d = flatten(&registry.defs[&c.def_name], registry).to_def();
            d.name = flat_name.clone();
            defs.insert(flat_name.clone(), d);
        }
        new_root
            .components
            .push(ComponentInstance::new(c.instance_name.clone(), flat_name));
    }
    defs.insert(new_root.name.clone(), new_root);
    Registry {
        defs,
        root: registry.root.clone(),
    }
}
