//! Hierarchical equation-oriented model IR.
//!
//! A model definition is the triple of declared variables, component
//! instances and equations. Equations carry incidence only: which variable
//! (at which derivative order) occurs in them, and whether that occurrence is
//! linear with a time-invariant coefficient.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Default cap on derivative orders produced by structural differentiation.
pub const DEFAULT_DERIVATIVE_CAP: u32 = 20;

/// Equation kind of a model definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Nonlinear algebraic equations.
    Nlae,
    /// Differential-algebraic equations.
    Dae,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Nlae => f.write_str("nlae"),
            ModelKind::Dae => f.write_str("dae"),
        }
    }
}

/// A variable or one of its time derivatives. Different orders are distinct
/// graph nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub base: String,
    pub order: u32,
}

impl VarRef {
    pub fn new(base: impl Into<String>, order: u32) -> Self {
        VarRef {
            base: base.into(),
            order,
        }
    }

    pub fn plain(base: impl Into<String>) -> Self {
        VarRef::new(base, 0)
    }

    pub fn derivative(&self) -> VarRef {
        VarRef::new(self.base.clone(), self.order + 1)
    }

    pub fn prefixed(&self, prefix: &str) -> VarRef {
        VarRef::new(qualify(prefix, &self.base), self.order)
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        for _ in 0..self.order {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// Join an instance path and a local name with `.`.
pub fn qualify(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        let mut s = String::with_capacity(prefix.len() + name.len() + 1);
        s.push_str(prefix);
        s.push('.');
        s.push_str(name);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub var: VarRef,
    /// The occurrence is linear with a time-invariant coefficient, so its
    /// derivative does not reintroduce the undifferentiated variable.
    pub linear_ti: bool,
}

impl Occurrence {
    pub fn new(var: VarRef) -> Self {
        Occurrence {
            var,
            linear_ti: false,
        }
    }

    pub fn linear(var: VarRef) -> Self {
        Occurrence {
            var,
            linear_ti: true,
        }
    }
}

/// An equation. `diff_count > 0` marks a structurally differentiated copy of
/// the user equation `id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub id: String,
    pub occurrences: Vec<Occurrence>,
    pub diff_count: u32,
}

impl Equation {
    pub fn new(id: impl Into<String>, occurrences: Vec<Occurrence>) -> Self {
        Equation {
            id: id.into(),
            occurrences,
            diff_count: 0,
        }
    }

    /// Shorthand for an equation whose occurrences are all nonlinear, order 0.
    pub fn over_vars(id: impl Into<String>, vars: &[&str]) -> Self {
        Equation::new(
            id,
            vars.iter().map(|v| Occurrence::new(VarRef::plain(*v))).collect(),
        )
    }

    /// Display name: the id followed by one prime per differentiation.
    pub fn name(&self) -> String {
        let mut s = self.id.clone();
        for _ in 0..self.diff_count {
            s.push('\'');
        }
        s
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarRef> {
        self.occurrences.iter().map(|o| &o.var)
    }

    /// Copy with the id and every variable base qualified by `prefix`.
    pub fn prefixed(&self, prefix: &str) -> Equation {
        Equation {
            id: qualify(prefix, &self.id),
            occurrences: self
                .occurrences
                .iter()
                .map(|o| Occurrence {
                    var: o.var.prefixed(prefix),
                    linear_ti: o.linear_ti,
                })
                .collect(),
            diff_count: self.diff_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInstance {
    pub instance_name: String,
    pub def_name: String,
}

impl ComponentInstance {
    pub fn new(instance_name: impl Into<String>, def_name: impl Into<String>) -> Self {
        ComponentInstance {
            instance_name: instance_name.into(),
            def_name: def_name.into(),
        }
    }
}

/// A model definition `(A, S, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDef {
    pub name: String,
    pub kind: ModelKind,
    pub variables: Vec<String>,
    pub components: Vec<ComponentInstance>,
    pub equations: Vec<Equation>,
}

impl ModelDef {
    pub fn new(name: impl Into<String>, kind: ModelKind) -> Self {
        ModelDef {
            name: name.into(),
            kind,
            variables: Vec::new(),
            components: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn is_primary(&self) -> bool {
        self.components.is_empty()
    }
}

/// All model definitions of a file plus the designated root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub defs: BTreeMap<String, ModelDef>,
    pub root: String,
}

impl Registry {
    pub fn get(&self, name: &str) -> Option<&ModelDef> {
        self.defs.get(name)
    }

    pub fn root_def(&self) -> &ModelDef {
        &self.defs[&self.root]
    }

    /// Registry holding a single primary model.
    pub fn single(def: ModelDef) -> Registry {
        let root = def.name.clone();
        let mut defs = BTreeMap::new();
        defs.insert(root.clone(), def);
        Registry { defs, root }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varref_display_uses_primes() {
        assert_eq!(VarRef::new("V", 0).to_string(), "V");
        assert_eq!(VarRef::new("V", 2).to_string(), "V''");
        assert_eq!(VarRef::new("C.x", 1).to_string(), "C.x'");
    }

    #[test]
    fn orders_are_distinct_nodes() {
        assert_ne!(VarRef::new("v", 0), VarRef::new("v", 1));
    }

    #[test]
    fn equation_prefix_qualifies_everything() {
        let e = Equation::over_vars("e1", &["a", "b"]).prefixed("c1");
        assert_eq!(e.id, "c1.e1");
        assert_eq!(e.occurrences[1].var.base, "c1.b");
        assert_eq!(e.name(), "c1.e1");
    }
}
