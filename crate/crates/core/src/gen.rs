//! Seeded random hierarchical models with controlled under-constrained
//! ratio, degree and depth.
//!
//! Every component definition is over-free by construction: each equation
//! gets a distinct partner variable up front, and further edges are added
//! only where they cannot create an over-constrained part.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::flatten::flatten;
use crate::graph::{BipartiteGraph, Part};
use crate::hier::decompose_system;
use crate::model::{ComponentInstance, Equation, ModelDef, ModelKind, Occurrence, Registry, VarRef};
use crate::system::{solve, EquationSystem};

const MAX_ATTEMPTS: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Node budget (variables plus equations) of each leaf definition.
    pub n_per_component: usize,
    /// Components instantiated by the root. Zero gives a primary model.
    pub k: usize,
    /// Target share of a component's nodes in its under-constrained part.
    pub r: f64,
    /// Target average node degree.
    pub c0: f64,
    /// Depth of the hierarchy below the root.
    pub levels: usize,
    pub kind: ModelKind,
    pub seed: u64,
    /// Components instantiated by each intermediate definition.
    pub branching: usize,
    /// Distinct definitions per level; 0 picks half the instance count so
    /// definitions are reused.
    pub pool: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_per_component: 40,
            k: 4,
            r: 0.1,
            c0: 6.0,
            levels: 1,
            kind: ModelKind::Nlae,
            seed: 0,
            branching: 2,
            pool: 0,
        }
    }
}

impl GenParams {
    fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidParams(m.to_string()));
        if !(0.0..=1.0).contains(&self.r) {
            return bad("r must lie in [0, 1]");
        }
        if self.c0.is_nan() || self.c0 < 1.0 {
            return bad("c0 must be at least 1");
        }
        if self.n_per_component < 2 {
            return bad("n_per_component must be at least 2");
        }
        if self.k > 0 && self.levels == 0 {
            return bad("levels must be at least 1 when k > 0");
        }
        if self.levels > 1 && self.branching == 0 {
            return bad("branching must be at least 1 for nested levels");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub registry: Registry,
    /// Measured under-constrained share over the root's components.
    pub achieved_r: f64,
    /// Nodes of the flattened model.
    pub n_total: usize,
}

/// A definition under construction: equations as sets of variable indices.
struct Draft {
    var_names: Vec<String>,
    eqs: Vec<BTreeSet<usize>>,
}

impl Draft {
    fn edges(&self) -> usize {
        self.eqs.iter().map(BTreeSet::len).sum()
    }
}

struct Spec {
    def: ModelDef,
    /// Local variable names left free for the parent to determine.
    designated: Vec<String>,
}

struct Gen<'a> {
    p: &'a GenParams,
    rng: ChaCha8Rng,
    defs: BTreeMap<String, ModelDef>,
}

fn target_edges(c0: f64, nodes: usize) -> usize {
    (c0 * nodes as f64 / 2.0).round() as usize
}

impl Gen<'_> {
    /// Square core with a lower-triangular fill and an under-constrained
    /// tail fed by the extra variables.
    fn leaf_draft(&mut self) -> (Draft, Vec<usize>) {
        let n = self.p.n_per_component;
        let budget = (self.p.r * n as f64).round() as usize;
        let extra = if self.p.r > 0.0 { (budget / 5).max(1) } else { 0 };
        let core = (n.saturating_sub(extra) / 2).max(1);
        let tail = if extra > 0 {
            (budget.saturating_sub(extra) / 2).clamp(1, core)
        } else {
            0
        };
        let mut eqs: Vec<BTreeSet<usize>> = (0..core).map(|i| BTreeSet::from([i])).collect();
        let first_tail = core - tail;
        for t in first_tail + 1..core {
            eqs[t].insert(t - 1);
        }
        let extras: Vec<usize> = (core..core + extra).collect();
        for (k, &x) in extras.iter().enumerate() {
            let t = if k == 0 {
                first_tail
            } else {
                self.rng.gen_range(first_tail..core)
            };
            eqs[t].insert(x);
        }
        let mut d = Draft {
            var_names: Vec::new(),
            eqs,
        };
        let target = target_edges(self.p.c0, 2 * core + extra);
        let mut tries = 0;
        while d.edges() < target && tries < 20 * target && core > 1 {
            tries += 1;
            let i = self.rng.gen_range(1..core);
            let j = self.rng.gen_range(0..i);
            d.eqs[i].insert(j);
        }
        (d, extras)
    }

    fn leaf(&mut self, name: &str) -> Spec {
        let (mut d, extras) = self.leaf_draft();
        let n_vars = d.eqs.len() + extras.len();
        let mut labels: Vec<usize> = (0..n_vars).collect();
        labels.shuffle(&mut self.rng);
        d.var_names = labels.iter().map(|l| format!("x{l}")).collect();
        let designated = extras.iter().map(|&x| d.var_names[x].clone()).collect();
        d.eqs.shuffle(&mut self.rng);
        Spec {
            def: self.finish(name, d, Vec::new()),
            designated,
        }
    }

    /// Own square core, one coupling equation per designated child
    /// variable, and random edges anywhere else.
    fn composite(&mut self, name: &str, children: &[(String, &Spec)], is_root: bool) -> Spec {
        let own = (self.p.n_per_component / 4).max(2);
        let child_free: Vec<String> = children
            .iter()
            .flat_map(|(inst, s)| s.designated.iter().map(move |v| format!("{inst}.{v}")))
            .collect();
        let child_any: Vec<String> = children
            .iter()
            .flat_map(|(inst, s)| s.def.variables.iter().map(move |v| format!("{inst}.{v}")))
            .collect();
        let extra = if is_root || self.p.r == 0.0 {
            0
        } else {
            ((self.p.r * child_free.len() as f64).round() as usize).max(1)
        };
        let mut var_names: Vec<String> = (0..own + extra).map(|i| format!("y{i}")).collect();
        let child_base = var_names.len();
        var_names.extend(child_free.iter().cloned());
        let mut eqs: Vec<BTreeSet<usize>> = (0..own).map(|i| BTreeSet::from([i])).collect();
        for i in 1..own {
            let j = self.rng.gen_range(0..i);
            eqs[i].insert(j);
        }
        for c in 0..child_free.len() {
            let mut e = BTreeSet::from([child_base + c]);
            e.insert(self.rng.gen_range(0..own));
            eqs.push(e);
        }
        for x in own..own + extra {
            let j = self.rng.gen_range(own.min(eqs.len() - 1)..eqs.len());
            eqs[j].insert(x);
        }
        let mut designated: Vec<String> = (own..own + extra).map(|i| var_names[i].clone()).collect();

        if is_root {
            match self.rng.gen_range(-1i32..=1) {
                -1 if !child_free.is_empty() => {
                    eqs.pop();
                }
                -1 => {
                    let x = var_names.len();
                    var_names.push(format!("y{}", own));
                    let j = self.rng.gen_range(0..eqs.len());
                    eqs[j].insert(x);
                    designated.push(var_names[x].clone());
                }
                1 => {
                    let a = self.rng.gen_range(0..own);
                    let b = self.rng.gen_range(0..var_names.len());
                    eqs.push(BTreeSet::from([a, b]));
                }
                _ => {}
            }
        }

        let mut index: BTreeMap<String, usize> =
            var_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut d = Draft { var_names, eqs };
        let nodes = d.var_names.len() + d.eqs.len();
        let target = target_edges(self.p.c0, nodes);
        let mut tries = 0;
        while d.edges() < target && tries < 20 * target {
            tries += 1;
            let j = self.rng.gen_range(0..d.eqs.len());
            let pick_child = !child_any.is_empty() && self.rng.gen_bool(0.5);
            let v = if pick_child {
                let name = &child_any[self.rng.gen_range(0..child_any.len())];
                *index.entry(name.clone()).or_insert_with(|| {
                    d.var_names.push(name.clone());
                    d.var_names.len() - 1
                })
            } else {
                self.rng.gen_range(0..own)
            };
            d.eqs[j].insert(v);
        }
        let comps = children
            .iter()
            .map(|(inst, s)| ComponentInstance::new(inst.clone(), s.def.name.clone()))
            .collect();
        d.eqs.shuffle(&mut self.rng);
        Spec {
            def: self.finish(name, d, comps),
            designated,
        }
    }

    fn finish(&mut self, name: &str, d: Draft, components: Vec<ComponentInstance>) -> ModelDef {
        let mut def = ModelDef::new(name, self.p.kind);
        def.components = components;
        def.variables = d
            .var_names
            .iter()
            .filter(|v| !v.contains('.'))
            .cloned()
            .collect();
        def.variables.sort_by(|a, b| natural(a).cmp(&natural(b)));
        for (k, e) in d.eqs.iter().enumerate() {
            let occurrences = e
                .iter()
                .map(|&i| {
                    let var = d.var_names[i].clone();
                    match self.p.kind {
                        ModelKind::Nlae => Occurrence::new(VarRef::plain(var)),
                        ModelKind::Dae => {
                            let u: f64 = self.rng.gen();
                            let order = if u < 0.6 { 0 } else if u < 0.9 { 1 } else { 2 };
                            Occurrence {
                                var: VarRef::new(var, order),
                                linear_ti: self.rng.gen_bool(0.5),
                            }
                        }
                    }
                })
                .collect();
            def.equations.push(Equation::new(format!("f{k}"), occurrences));
        }
        def
    }

    /// DAE definitions are checked for an empty over part and rebuilt with
    /// fresh draws if needed.
    fn accept(&self, def: &ModelDef) -> bool {
        if self.p.kind == ModelKind::Nlae {
            return true;
        }
        let mut defs = self.defs.clone();
        defs.insert(def.name.clone(), def.clone());
        let reg = Registry {
            defs,
            root: def.name.clone(),
        };
        let sys = EquationSystem::from_flat(&flatten(def, &reg));
        decompose_system(&def.name, &sys, crate::model::DEFAULT_DERIVATIVE_CAP)
            .map(|d| d.over_empty())
            .unwrap_or(false)
    }

    fn build<F>(&mut self, name: &str, mut make: F) -> Result<Spec, GenError>
    where
        F: FnMut(&mut Self) -> Spec,
    {
        for _ in 0..MAX_ATTEMPTS {
            let s = make(self);
            if self.accept(&s.def) {
                self.defs.insert(name.to_string(), s.def.clone());
                return Ok(s);
            }
        }
        Err(GenError::Infeasible {
            def_name: name.to_string(),
            attempts: MAX_ATTEMPTS,
        })
    }
}

/// Order `x10` after `x9`.
fn natural(s: &str) -> (String, usize) {
    let digits = s.trim_start_matches(|c: char| !c.is_ascii_digit());
    let prefix = &s[..s.len() - digits.len()];
    (prefix.to_string(), digits.parse().unwrap_or(0))
}

fn pick_pool(p: &GenParams, instances: usize) -> usize {
    if p.pool > 0 {
        p.pool.min(instances.max(1))
    } else {
        instances.div_ceil(2).max(1)
    }
}

/// Build a random hierarchical model. Deterministic in `p`.
pub fn generate_model(p: &GenParams) -> Result<Generated, GenError> {
    p.check()?;
    let mut g = Gen {
        p,
        rng: ChaCha8Rng::seed_from_u64(p.seed),
        defs: BTreeMap::new(),
    };
    if p.k == 0 {
        let s = g.build("Root", |g| g.leaf("Root"))?;
        return finish(g, s);
    }

    // Definitions per level, leaves first.
    let mut instances_at = vec![0usize; p.levels];
    instances_at[p.levels - 1] = p.k;
    for l in (0..p.levels - 1).rev() {
        instances_at[l] = pick_pool(p, instances_at[l + 1]) * p.branching;
    }
    let mut below: Vec<Spec> = Vec::new();
    for (l, &count) in instances_at.iter().enumerate() {
        let pool = pick_pool(p, count);
        let mut level = Vec::with_capacity(pool);
        for i in 0..pool {
            let name = format!("L{l}_{i}");
            let s = if l == 0 {
                g.build(&name, |g| g.leaf(&name))?
            } else {
                let offset = i * p.branching;
                g.build(&name, |g| {
                    let children: Vec<(String, &Spec)> = (0..p.branching)
                        .map(|b| (format!("c{b}"), &below[(offset + b) % below.len()]))
                        .collect();
                    g.composite(&name, &children, false)
                })?
            };
            level.push(s);
        }
        below = level;
    }
    let children: Vec<(String, &Spec)> =
        (0..p.k).map(|i| (format!("c{i}"), &below[i % below.len()])).collect();
    let root = g.composite("Root", &children, true);
    g.defs.insert("Root".into(), root.def.clone());
    finish(g, root)
}

fn finish(mut g: Gen<'_>, root: Spec) -> Result<Generated, GenError> {
    g.defs.insert(root.def.name.clone(), root.def.clone());
    let registry = Registry {
        defs: g.defs,
        root: root.def.name.clone(),
    };
    let flat = flatten(registry.root_def(), &registry);
    let n_total = flat.variables.len() + flat.equations.len();

    let mut ratio: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let (mut u_sum, mut n_sum) = (0usize, 0usize);
    for c in &registry.root_def().components {
        let (u, n) = match ratio.get(c.def_name.as_str()) {
            Some(&x) => x,
            None => {
                let def = &registry.defs[&c.def_name];
                let sys = EquationSystem::from_flat(&flatten(def, &registry));
                let solved = solve(&sys, crate::model::DEFAULT_DERIVATIVE_CAP)
                    .map_err(|e| GenError::Analysis(e.into()))?;
                let dm = solved.partition();
                let u = dm.var_part.iter().chain(&dm.eq_part).filter(|x| **x == Part::Under).count();
                let x = (u, solved.graph.n_nodes());
                ratio.insert(&c.def_name, x);
                x
            }
        };
        u_sum += u;
        n_sum += n;
    }
    let achieved_r = if n_sum == 0 { 0.0 } else { u_sum as f64 / n_sum as f64 };
    Ok(Generated {
        registry,
        achieved_r,
        n_total,
    })
}

/// Seeded random bipartite graph where each edge is present with
/// probability `density`.
pub fn random_bipartite(seed: u64, n_vars: usize, n_eqs: usize, density: f64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for j in 0..n_eqs {
        for i in 0..n_vars {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph::from_edges(n_vars, n_eqs, &edges)
}
