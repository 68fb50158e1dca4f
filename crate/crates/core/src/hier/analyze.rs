use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{AnalysisError, ComponentViolation, ModelError};
use crate::graph::{dm_decompose, BipartiteGraph, Part};
use crate::hier::{build_dummy, decompose_system, ComponentDecomposition, DecompositionCache, DummyModel};
use crate::model::{qualify, Equation, ModelDef, ModelKind, Occurrence, Registry, VarRef, DEFAULT_DERIVATIVE_CAP};
use crate::parse::reachable_defs;
use crate::report::{AnalysisReport, LocalizedOver, Mode};
use crate::system::{report_for, solve, EquationSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub cap: u32,
    /// Decompose sibling component definitions on the rayon pool.
    pub parallel: bool,
    /// Trace a singular NLAE root's over part into its direct components.
    pub localize: bool,
    /// Add a spurious unknown to the root dummy model. Exists only to test
    /// that equivalence checking catches a perturbed dummy.
    pub inject_fault: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            cap: DEFAULT_DERIVATIVE_CAP,
            parallel: false,
            localize: true,
            inject_fault: false,
        }
    }
}

/// Kind used for every definition of the analysis: the root's. An NLAE root
/// may not reach DAE definitions.
pub fn analysis_kind(registry: &Registry) -> Result<ModelKind, ModelError> {
    let root = registry
        .get(&registry.root)
        .ok_or_else(|| ModelError::MissingRoot(registry.root.clone()))?;
    if root.kind == ModelKind::Nlae {
        for name in reachable_defs(registry, &root.name) {
            if registry.defs[&name].kind == ModelKind::Dae {
                return Err(ModelError::MixedKind {
                    root: root.name.clone(),
                    def_name: name,
                });
            }
        }
    }
    Ok(root.kind)
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

struct Analyzer<'a> {
    registry: &'a Registry,
    cache: &'a DecompositionCache,
    kind: ModelKind,
    opts: AnalysisOptions,
}

type Decomposed = Vec<(String, Arc<ComponentDecomposition>)>;

impl Analyzer<'_> {
    fn decomposition(&self, def_name: &str) -> Result<Arc<ComponentDecomposition>, AnalysisError> {
        if let Some(d) = self.cache.get(self.kind, def_name) {
            return Ok(d);
        }
        let def = &self.registry.defs[def_name];
        let (dummy, comps) = self.dummy(def)?;
        let mut d = decompose_system(def_name, &dummy.system, self.opts.cap)?;
        let mut nested: BTreeMap<String, u32> = BTreeMap::new();
        for (inst, c) in &comps {
            for (k, n) in &c.diff_counts {
                nested.insert(qualify(inst, k), *n);
            }
        }
        nested.append(&mut d.diff_counts);
        d.diff_counts = nested;
        Ok(self.cache.insert(d))
    }

    /// Decompositions of the direct components of `def`. Violations of all
    /// siblings are gathered before failing.
    fn components(&self, def: &ModelDef) -> Result<Decomposed, AnalysisError> {
        let mut names: Vec<&str> = def.components.iter().map(|c| c.def_name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        let results: Vec<(&str, Result<Arc<ComponentDecomposition>, AnalysisError>)> =
            if self.opts.parallel && names.len() > 1 {
                names.par_iter().map(|n| (*n, self.decomposition(n))).collect()
            } else {
                names.iter().map(|n| (*n, self.decomposition(n))).collect()
            };
        let by_name: BTreeMap<&str, &Result<_, _>> = results.iter().map(|(n, r)| (*n, r)).collect();

        let mut out = Vec::with_capacity(def.components.len());
        let mut violations = Vec::new();
        for c in &def.components {
            match by_name[c.def_name.as_str()] {
                Ok(d) if d.over_empty() => out.push((c.instance_name.clone(), d.clone())),
                Ok(d) => violations.push(ComponentViolation {
                    instance_path: c.instance_name.clone(),
                    def_name: d.def_name.clone(),
                    exposed_equations: d
                        .over_equations
                        .iter()
                        .map(|e| qualify(&c.instance_name, e))
                        .collect(),
                }),
                Err(AnalysisError::ComponentViolations(vs)) => {
                    violations.extend(vs.iter().map(|v| ComponentViolation {
                        instance_path: qualify(&c.instance_name, &v.instance_path),
                        def_name: v.def_name.clone(),
                        exposed_equations: v
                            .exposed_equations
                            .iter()
                            .map(|e| qualify(&c.instance_name, e))
                            .collect(),
                    }))
                }
                Err(e) => return Err(e.clone()),
            }
        }
        if violations.is_empty() {
            Ok(out)
        } else {
            Err(AnalysisError::ComponentViolations(violations))
        }
    }

    fn dummy(&self, def: &ModelDef) -> Result<(DummyModel, Decomposed), AnalysisError> {
        let comps = self.components(def)?;
        let refs: Vec<(&str, &ComponentDecomposition)> =
            comps.iter().map(|(i, d)| (i.as_str(), d.as_ref())).collect();
        Ok((build_dummy(def, self.kind, &refs), comps))
    }
}

/// Hierarchical analysis of the registry's root: components bottom-up
/// through the cache, then the root's dummy model.
///
/// The registry is expected to be validated.
pub fn analyze(
    registry: &Registry,
    cache: &DecompositionCache,
    opts: AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    let start = Instant::now();
    let kind = analysis_kind(registry)?;
    let a = Analyzer {
        registry,
        cache,
        kind,
        opts,
    };
    let root = registry.root_def();
    let (mut dummy, comps) = a.dummy(root)?;
    let t_components = ms_since(start);

    let t = Instant::now();
    if opts.inject_fault {
        dummy.system.variables.push(VarRef::plain("__fault"));
        dummy.system.scope.add_base("__fault", 0);
    }
    let solved = solve(&dummy.system, opts.cap)?;
    let mut report = report_for(&root.name, Mode::Hierarchical, &solved);

    let mut diff_counts = BTreeMap::new();
    for (inst, c) in &comps {
        for (k, n) in &c.diff_counts {
            diff_counts.insert(qualify(inst, k), *n);
        }
    }
    diff_counts.append(&mut report.diff_counts);
    report.diff_counts = diff_counts;

    if opts.localize && kind == ModelKind::Nlae && !report.over_equations.is_empty() {
        report.localized_over = localize(&a, &dummy, &comps, &report.over_equations)?;
    }
    report.timings_ms.insert("components".into(), t_components);
    report.timings_ms.insert("root".into(), ms_since(t));
    report.timings_ms.insert("total".into(), ms_since(start));
    Ok(report)
}

/// Trace a root over part back into the direct components whose variables
/// it touches.
fn localize(
    a: &Analyzer<'_>,
    root_dummy: &DummyModel,
    comps: &Decomposed,
    over_equations: &[String],
) -> Result<Vec<LocalizedOver>, AnalysisError> {
    let over: BTreeSet<&str> = over_equations.iter().map(String::as_str).collect();
    let over_eqs: Vec<&Equation> = root_dummy
        .system
        .equations
        .iter()
        .filter(|e| over.contains(e.name().as_str()))
        .collect();
    let mut out = Vec::new();
    let mut done = BTreeSet::new();
    for (inst, _) in comps {
        if !done.insert(inst.clone()) {
            continue;
        }
        let def_name = &a
            .registry
            .root_def()
            .components
            .iter()
            .find(|c| &c.instance_name == inst)
            .expect("instance of root")
            .def_name;
        let def = &a.registry.defs[def_name];
        let (comp_dummy, _) = a.dummy(def)?;
        let prefix = format!("{inst}.");
        let mut shared: BTreeSet<VarRef> = BTreeSet::new();
        for e in &over_eqs {
            for v in e.vars() {
                if let Some(local) = v.base.strip_prefix(&prefix) {
                    shared.insert(VarRef::new(local, v.order));
                }
            }
        }
        let shared: Vec<VarRef> = shared.into_iter().collect();
        let eqs = localize_component_over(&comp_dummy.system, &shared);
        if !eqs.is_empty() {
            out.push(LocalizedOver {
                instance: inst.clone(),
                equations: eqs.iter().map(|e| qualify(inst, e)).collect(),
            });
        }
    }
    Ok(out)
}

/// Add an assignment equation for every shared variable to the component's
/// (NLAE) system and return the component equations in the over part of
/// the result.
pub fn localize_component_over(comp: &EquationSystem, shared: &[VarRef]) -> Vec<String> {
    let known: BTreeSet<&VarRef> = comp.variables.iter().collect();
    let assigned: Vec<&VarRef> = shared.iter().filter(|v| known.contains(v)).collect();
    if assigned.is_empty() {
        return Vec::new();
    }
    let mut equations = comp.equations.clone();
    let n_own = equations.len();
    for v in &assigned {
        equations.push(Equation::new(
            format!("assign({v})"),
            vec![Occurrence::new((*v).clone())],
        ));
    }
    let g = BipartiteGraph::build(&equations, comp.variables.iter().cloned());
    let dm = dm_decompose(&g);
    (0..n_own)
        .filter(|&j| dm.eq_part[j] == Part::Over)
        .map(|j| g.eq_name(j).to_string())
        .collect()
}
