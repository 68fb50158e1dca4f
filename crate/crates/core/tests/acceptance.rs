//! Acceptance criteria, run in order with one PASS/FAIL line each. Runs
//! without the libtest harness so timings are not disturbed by other tests.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{dae_scope, fixture, random_dae_component, under_before_and_after_well_differentiation};
use hsa_core::bench::{bench_model, equivalence_suite, suite_params};
use hsa_core::cost::cost_curves;
use hsa_core::flatten::flatten;
use hsa_core::gen::{generate_model, random_bipartite, GenParams};
use hsa_core::graph::{
    dm_by_enumeration, dm_decompose, dm_from_matching, max_matching_with, BipartiteGraph,
    DmPartition, MatchingOptions, DEFAULT_ORACLE_BOUND,
};
use hsa_core::hier::{decompose_dae, decompose_nlae};
use hsa_core::model::{Equation, ModelKind, VarRef};
use hsa_core::system::EquationSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn names<'a>(g: &'a BipartiteGraph, vars: &[usize], eqs: &[usize]) -> (BTreeSet<String>, BTreeSet<&'a str>) {
    (
        vars.iter().map(|&i| g.var(i).to_string()).collect(),
        eqs.iter().map(|&j| g.eq_name(j)).collect(),
    )
}

fn set<'a>(xs: &[&'a str]) -> BTreeSet<&'a str> {
    xs.iter().copied().collect()
}

fn owned(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn seven_equation_partition() -> Outcome {
    let reg = fixture("seven.json");
    let g = EquationSystem::from_flat(&flatten(reg.root_def(), &reg)).graph();
    dm_decompose(&g);
    let mut best = Duration::MAX;
    let mut dm = None;
    for _ in 0..5 {
        let t = Instant::now();
        let d = dm_decompose(&g);
        best = best.min(t.elapsed());
        dm = Some(d);
    }
    let dm = dm.unwrap();
    let over = names(&g, &dm.over_vars(), &dm.over_eqs());
    let well = names(&g, &dm.well_vars(), &dm.well_eqs());
    let under = names(&g, &dm.under_vars(), &dm.under_eqs());
    check(over == (owned(&["v1", "v2"]), set(&["e1", "e2", "e3"])), format!("over {over:?}"))?;
    check(well == (owned(&["v3", "v4"]), set(&["e4", "e5"])), format!("well {well:?}"))?;
    check(under == (owned(&["v5", "v6", "v7"]), set(&["e6", "e7"])), format!("under {under:?}"))?;
    check(best < Duration::from_millis(1), format!("took {best:?}"))?;
    Ok(format!("exact partition in {best:?}"))
}

fn subsystem_under_part() -> Outcome {
    let eqs = vec![
        Equation::over_vars("e4", &["v2", "v3", "v4"]),
        Equation::over_vars("e5", &["v3", "v4"]),
        Equation::over_vars("e6", &["v4", "v5", "v6"]),
        Equation::over_vars("e7", &["v5", "v6", "v7"]),
    ];
    let g = BipartiteGraph::build(&eqs, ["v3", "v4", "v5", "v6", "v7"].map(VarRef::plain));
    let part = decompose_nlae(&g);
    let under = names(&g, &part.vars, &part.eqs);
    check(under == (owned(&["v5", "v6", "v7"]), set(&["e6", "e7"])), format!("under {under:?}"))?;
    Ok("under part {v5,v6,v7}, {e6,e7}".into())
}

fn gas_index_reduction() -> Outcome {
    let reg = fixture("gas.json");
    let sys = EquationSystem::from_flat(&flatten(reg.root_def(), &reg));
    let (aug, part) = decompose_dae(&sys.equations, &sys.scope, 20).map_err(|e| e.to_string())?;
    let counts: Vec<(&str, u32)> =
        aug.diff_log.iter().filter(|(_, n)| **n > 0).map(|(k, n)| (k.as_str(), *n)).collect();
    check(counts == [("e2", 1), ("e3", 1), ("e4", 1)], format!("differentiated {counts:?}"))?;
    let g = &aug.graph;
    let dm = dm_from_matching(g, &aug.matching);
    check(!dm.has_over(), "over part not empty")?;
    let well_vars: Vec<usize> = (0..g.n_vars()).filter(|i| !part.vars.contains(i)).collect();
    let well_eqs: Vec<usize> = (0..g.n_eqs()).filter(|j| !part.eqs.contains(j)).collect();
    let well = names(g, &well_vars, &well_eqs);
    check(well == (owned(&["V", "V'"]), set(&["e2", "e2'"])), format!("well {well:?}"))?;
    Ok("e2, e3, e4 differentiated once; well part {V,V'}, {e2,e2'}".into())
}

fn suite(kind: ModelKind, count: usize, seed: u64, budget: Option<Duration>) -> Outcome {
    let params = suite_params(kind, count, seed, 500);
    let t = Instant::now();
    let cases = equivalence_suite(&params, 500, true);
    let took = t.elapsed();
    let mut singular = 0;
    for (i, c) in cases.into_iter().enumerate() {
        let c = c.map_err(|e| format!("model {i}: {e}"))?;
        check(c.n_total <= 500, format!("model {i} has {} nodes", c.n_total))?;
        check(
            c.verdict.equivalent,
            format!("model {i} (seed {}): {:?} {}", c.params.seed, c.verdict.clause, c.verdict.detail),
        )?;
        singular += usize::from(c.singular);
    }
    if let Some(b) = budget {
        check(took < b, format!("took {took:?}"))?;
    }
    Ok(format!("{count}/{count} equivalent ({singular} singular) in {took:.1?}"))
}

fn graph_strategy(rng: &mut ChaCha8Rng, max: usize) -> BipartiteGraph {
    let nv = rng.gen_range(0..=max);
    let ne = rng.gen_range(0..=max);
    random_bipartite(rng.gen(), nv, ne, rng.gen_range(0.05..0.6))
}

fn seed_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 0..100 {
        let g = graph_strategy(&mut rng, 40);
        let parts: Vec<DmPartition> = (0..10)
            .map(|_| {
                let m = max_matching_with(&g, MatchingOptions { seed: Some(rng.gen()), ..MatchingOptions::default() });
                dm_from_matching(&g, &m)
            })
            .collect();
        check(parts.windows(2).all(|w| w[0] == w[1]), format!("graph {n} differs across seeds"))?;
    }
    Ok("100 graphs, 10 matching seeds each, one partition per graph".into())
}

fn enumeration_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 0..500 {
        let g = graph_strategy(&mut rng, 8);
        let oracle = dm_by_enumeration(&g, DEFAULT_ORACLE_BOUND).map_err(|e| e.to_string())?;
        check(dm_decompose(&g) == oracle, format!("graph {n} differs from enumeration"))?;
    }
    Ok("500 graphs up to 8+8 nodes match enumeration".into())
}

fn well_differentiation() -> Outcome {
    for seed in 0..100 {
        let eqs = random_dae_component(seed, 24);
        let (before, after) = under_before_and_after_well_differentiation(&eqs, &dae_scope(&eqs));
        check(before == after, format!("component {seed}: under part changed"))?;
    }
    Ok("100 components keep their under part".into())
}

fn cost_orderings() -> Outcome {
    let pts = cost_curves(&[1e2, 1e3, 1e4], &[2, 10, 50], &[0.01, 0.1, 0.3], 6.0);
    for p in &pts {
        check(
            p.c_reuse <= p.c_total && p.c_total <= p.c_flattened,
            format!("n={} k={} r={}: {} {} {}", p.n, p.k, p.r, p.c_reuse, p.c_total, p.c_flattened),
        )?;
    }
    Ok(format!("{} grid points ordered", pts.len()))
}

fn empirical_speedup() -> Outcome {
    let t = Instant::now();
    let sparse = GenParams {
        n_per_component: 450,
        k: 10,
        r: 0.05,
        c0: 6.0,
        levels: 1,
        seed: 10,
        ..GenParams::default()
    };
    let g = generate_model(&sparse).map_err(|e| e.to_string())?;
    let row = bench_model(&g, &sparse, 5).map_err(|e| e.to_string())?;
    let dense = GenParams {
        n_per_component: 2500,
        k: 1,
        r: 0.9,
        ..sparse.clone()
    };
    let h = generate_model(&dense).map_err(|e| e.to_string())?;
    let row1 = bench_model(&h, &dense, 5).map_err(|e| e.to_string())?;
    let ratio = row1.t_hier_cold_ms / row1.t_flat_ms;
    let summary = format!(
        "n={} flat {:.1}ms cold {:.1}ms warm {:.1}ms; k=1 n={} r={:.2} hier/flat {:.2}",
        row.n_total, row.t_flat_ms, row.t_hier_cold_ms, row.t_hier_warm_ms, row1.n_total, row1.achieved_r, ratio
    );
    check(row.t_hier_cold_ms < row.t_flat_ms, format!("cold not faster: {summary}"))?;
    check(row.t_hier_warm_ms < row.t_hier_cold_ms, format!("warm not faster: {summary}"))?;
    check(row1.achieved_r >= 0.8, format!("under share too low: {summary}"))?;
    check(ratio >= 0.8, format!("unexpected advantage: {summary}"))?;
    let took = t.elapsed();
    check(took < Duration::from_secs(300), format!("took {took:?}"))?;
    Ok(summary)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("partition of the seven-equation example", seven_equation_partition),
        ("under part of the e4..e7 subsystem", subsystem_under_part),
        ("index reduction of the gas example", gas_index_reduction),
        ("hierarchical vs flat, 1000 NLAE models", || {
            suite(ModelKind::Nlae, 1000, 4, Some(Duration::from_secs(60)))
        }),
        ("hierarchical vs flat, 300 DAE models", || suite(ModelKind::Dae, 300, 5, None)),
        ("partition independent of matching seed", seed_invariance),
        ("partition equals enumeration oracle", enumeration_oracle),
        ("well differentiation keeps under part", well_differentiation),
        ("analytic cost orderings", cost_orderings),
        ("empirical speedup", empirical_speedup),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
