//! JSON model-file format.
//!
//! ```json
//! { "defs": [ { "name": "M", "kind": "nlae", "variables": ["x"],
//!               "components": [{"instance": "c", "def": "D"}],
//!               "equations": [{"id": "e1", "occ": [{"var": "x"}, {"var": "c.y", "order": 1}]}] } ],
//!   "root": "M" }
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{ComponentInstance, Equation, ModelDef, ModelKind, Occurrence, Registry, VarRef};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileObj {
    defs: Vec<DefObj>,
    root: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefObj {
    name: String,
    kind: ModelKind,
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    components: Vec<CompObj>,
    #[serde(default)]
    equations: Vec<EqObj>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompObj {
    instance: String,
    def: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EqObj {
    id: String,
    occ: Vec<OccObj>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OccObj {
    var: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    order: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    linear_ti: bool,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

fn is_false(v: &bool) -> bool {
    !*v
}

/// Parse and validate a model file.
pub fn parse_model(text: &str) -> Result<Registry, ModelError> {
    let file: FileObj = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut defs = BTreeMap::new();
    for d in file.defs {
        if defs.contains_key(&d.name) {
            return Err(ModelError::Duplicate {
                what: "model",
                name: d.name,
                scope: "file".into(),
            });
        }
        let def = ModelDef {
            name: d.name.clone(),
            kind: d.kind,
            variables: d.variables,
            components: d
                .components
                .into_iter()
                .map(|c| ComponentInstance::new(c.instance, c.def))
                .collect(),
            equations: d
                .equations
                .into_iter()
                .map(|e| {
                    Equation::new(
                        e.id,
                        e.occ
                            .into_iter()
                            .map(|o| Occurrence {
                                var: VarRef::new(o.var, o.order),
                                linear_ti: o.linear_ti,
                            })
                            .collect(),
                    )
                })
                .collect(),
        };
        defs.insert(d.name, def);
    }
    let registry = Registry {
        defs,
        root: file.root,
    };
    validate(&registry)?;
    Ok(registry)
}

/// Serialize a registry back into the model-file format.
pub fn to_json(registry: &Registry) -> String {
    let file = FileObj {
        defs: registry
            .defs
            .values()
            .map(|d| DefObj {
                name: d.name.clone(),
                kind: d.kind,
                variables: d.variables.clone(),
                components: d
                    .components
                    .iter()
                    .map(|c| CompObj {
                        instance: c.instance_name.clone(),
                        def: c.def_name.clone(),
                    })
                    .collect(),
                equations: d
                    .equations
                    .iter()
                    .map(|e| EqObj {
                        id: e.id.clone(),
                        occ: e
                            .occurrences
                            .iter()
                            .map(|o| OccObj {
                                var: o.var.base.clone(),
                                order: o.var.order,
                                linear_ti: o.linear_ti,
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
        root: registry.root.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model serialization cannot fail");
    s.push('\n');
    s
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_ident(s: &str) -> Result<(), ModelError> {
    if is_identifier(s) {
        Ok(())
    } else {
        Err(ModelError::InvalidIdentifier(s.to_string()))
    }
}

/// Check every structural invariant of a registry: identifiers, uniqueness,
/// reference resolution, acyclic instantiation and kind consistency.
pub fn validate(registry: &Registry) -> Result<(), ModelError> {
    if !registry.defs.contains_key(&registry.root) {
        return Err(ModelError::MissingRoot(registry.root.clone()));
    }
    for def in registry.defs.values() {
        validate_def(def, registry)?;
    }
    check_acyclic(registry)?;

    let root = registry.root_def();
    if root.kind == ModelKind::Nlae {
        for name in reachable_defs(registry, &registry.root) {
            if registry.defs[&name].kind == ModelKind::Dae {
                return Err(ModelError::MixedKind {
                    root: root.name.clone(),
                    def_name: name,
                });
            }
        }
    }
    Ok(())
}

fn validate_def(def: &ModelDef, registry: &Registry) -> Result<(), ModelError> {
    check_ident(&def.name)?;
    let mut names = HashSet::new();
    for v in &def.variables {
        check_ident(v)?;
        if !names.insert(v.as_str()) {
            return Err(ModelError::Duplicate {
                what: "variable",
                name: v.clone(),
                scope: def.name.clone(),
            });
        }
    }
    let mut instances: BTreeMap<&str, &ModelDef> = BTreeMap::new();
    for c in &def.components {
        check_ident(&c.instance_name)?;
        if !names.insert(c.instance_name.as_str()) {
            return Err(ModelError::Duplicate {
                what: "instance",
                name: c.instance_name.clone(),
                scope: def.name.clone(),
            });
        }
        let target = registry
            .defs
            .get(&c.def_name)
            .ok_or_else(|| ModelError::UnresolvedDef {
                parent: def.name.clone(),
                instance: c.instance_name.clone(),
                def_name: c.def_name.clone(),
            })?;
        instances.insert(c.instance_name.as_str(), target);
    }

    let mut ids = HashSet::new();
    for eq in &def.equations {
        check_ident(&eq.id)?;
        if !ids.insert(eq.id.as_str()) {
            return Err(ModelError::Duplicate {
                what: "equation",
                name: eq.id.clone(),
                scope: def.name.clone(),
            });
        }
        if eq.occurrences.is_empty() {
            return Err(ModelError::EmptyEquation {
                def_name: def.name.clone(),
                equation: eq.id.clone(),
            });
        }
        let mut seen = HashSet::new();
        for occ in &eq.occurrences {
            if !seen.insert(&occ.var) {
                return Err(ModelError::DuplicateOccurrence {
                    def_name: def.name.clone(),
                    equation: eq.id.clone(),
                    var: occ.var.to_string(),
                });
            }
            if def.kind == ModelKind::Nlae && occ.var.order > 0 {
                return Err(ModelError::DerivativeInNlae {
                    def_name: def.name.clone(),
                    equation: eq.id.clone(),
                    var: occ.var.to_string(),
                });
            }
            if !resolves(&occ.var.base, def, &instances) {
                return Err(ModelError::UnresolvedVariable {
                    def_name: def.name.clone(),
                    equation: eq.id.clone(),
                    var: occ.var.base.clone(),
                });
            }
        }
    }
    Ok(())
}

/// A reference resolves to a local variable or, as `instance.var`, to a
/// variable declared directly in a component's definition.
fn resolves(base: &str, def: &ModelDef, instances: &BTreeMap<&str, &ModelDef>) -> bool {
    match base.split_once('.') {
        None => def.variables.iter().any(|v| v == base),
        Some((inst, var)) => instances
            .get(inst)
            .is_some_and(|d| d.variables.iter().any(|v| v == var)),
    }
}

fn check_acyclic(registry: &Registry) -> Result<(), ModelError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        name: &str,
        registry: &Registry,
        marks: &mut BTreeMap<String, Mark>,
        stack: &mut Vec<String>,
    ) -> Result<(), ModelError> {
        match marks.get(name) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = stack.iter().position(|n| n == name).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(name.to_string());
                return Err(ModelError::CyclicInstantiation(cycle));
            }
            None => {}
        }
        marks.insert(name.to_string(), Mark::Active);
        stack.push(name.to_string());
        for c in &registry.defs[name].components {
            visit(&c.def_name, registry, marks, stack)?;
        }
        stack.pop();
        marks.insert(name.to_string(), Mark::Done);
        Ok(())
    }

    let mut marks = BTreeMap::new();
    for name in registry.defs.keys() {
        visit(name, registry, &mut marks, &mut Vec::new())?;
    }
    Ok(())
}

/// Definitions reachable from `from` (excluding it), in a stable order.
pub fn reachable_defs(registry: &Registry, from: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![from.to_string()];
    while let Some(name) = stack.pop() {
        for c in &registry.defs[&name].components {
            if out.insert(c.def_name.clone()) {
                stack.push(c.def_name.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
      "defs": [
        {"name": "D", "kind": "nlae", "variables": ["a", "b"],
         "equations": [{"id": "d1", "occ": [{"var": "a"}, {"var": "b"}]}]},
        {"name": "Top", "kind": "nlae", "variables": ["x"],
         "components": [{"instance": "c", "def": "D"}],
         "equations": [{"id": "t1", "occ": [{"var": "x"}, {"var": "c.a"}]}]}
      ],
      "root": "Top"
    }"#;

    #[test]
    fn parses_component_references() {
        let reg = parse_model(SMALL).unwrap();
        assert_eq!(reg.root, "Top");
        assert_eq!(reg.root_def().equations[0].occurrences[1].var.base, "c.a");
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("{\n  \"defs\": [,]\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unresolved_def_is_rejected() {
        let text = SMALL.replace(r#""def": "D""#, r#""def": "Nope""#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::UnresolvedDef { .. })
        ));
    }

    #[test]
    fn unresolved_variable_is_rejected() {
        let text = SMALL.replace(r#"{"var": "c.a"}"#, r#"{"var": "c.zz"}"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::UnresolvedVariable { .. })
        ));
    }

    #[test]
    fn grandchild_reference_is_rejected() {
        let text = r#"{"defs": [
            {"name": "L", "kind": "nlae", "variables": ["y"], "equations": [{"id": "l", "occ": [{"var": "y"}]}]},
            {"name": "M", "kind": "nlae", "components": [{"instance": "l", "def": "L"}]},
            {"name": "T", "kind": "nlae", "variables": ["x"], "components": [{"instance": "m", "def": "M"}],
             "equations": [{"id": "t", "occ": [{"var": "m.l.y"}]}]}
          ], "root": "T"}"#;
        assert!(matches!(
            parse_model(text),
            Err(ModelError::UnresolvedVariable { .. })
        ));
    }

    #[test]
    fn duplicates_are_rejected() {
        let text = SMALL.replace(r#""variables": ["a", "b"]"#, r#""variables": ["a", "a"]"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::Duplicate { what: "variable", .. })
        ));
        let text = SMALL.replace(r#""variables": ["x"]"#, r#""variables": ["c"]"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::Duplicate { what: "instance", .. })
        ));
    }

    #[test]
    fn cycles_are_rejected() {
        let text = r#"{"defs": [
            {"name": "A", "kind": "nlae", "components": [{"instance": "b", "def": "B"}]},
            {"name": "B", "kind": "nlae", "components": [{"instance": "a", "def": "A"}]}
          ], "root": "A"}"#;
        match parse_model(text) {
            Err(ModelError::CyclicInstantiation(path)) => {
                assert_eq!(path.first(), path.last());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nlae_rejects_derivatives() {
        let text = SMALL.replace(r#"{"var": "x"}"#, r#"{"var": "x", "order": 1}"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::DerivativeInNlae { .. })
        ));
    }

    #[test]
    fn empty_equation_and_repeated_occurrence() {
        let text = SMALL.replace(r#"[{"var": "a"}, {"var": "b"}]"#, "[]");
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::EmptyEquation { .. })
        ));
        let text = SMALL.replace(r#"[{"var": "a"}, {"var": "b"}]"#, r#"[{"var": "a"}, {"var": "a"}]"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelError::DuplicateOccurrence { .. })
        ));
    }

    #[test]
    fn missing_root() {
        let text = SMALL.replace(r#""root": "Top""#, r#""root": "Other""#);
        assert_eq!(
            parse_model(&text),
            Err(ModelError::MissingRoot("Other".into()))
        );
    }

    #[test]
    fn round_trip() {
        let reg = parse_model(SMALL).unwrap();
        let again = parse_model(&to_json(&reg)).unwrap();
        assert_eq!(reg, again);
    }
}
