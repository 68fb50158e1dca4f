//! Timing of flat against hierarchical analysis, and the random
//! equivalence suites.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::GenError;
use crate::gen::{generate_model, GenParams, Generated};
use crate::hier::{analyze, AnalysisOptions, DecompositionCache};
use crate::model::ModelKind;
use crate::oracle::{analyze_flat, check_equivalence, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub n_total: usize,
    pub k: usize,
    pub r: f64,
    pub kind: ModelKind,
    pub t_flat_ms: f64,
    pub t_hier_cold_ms: f64,
    pub t_hier_warm_ms: f64,
    pub achieved_r: f64,
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

fn timed<T, E>(f: impl FnOnce() -> Result<T, E>) -> Result<f64, E> {
    let t = Instant::now();
    f()?;
    Ok(t.elapsed().as_secs_f64() * 1000.0)
}

/// Median wall times over `repeats` runs on one generated model. Each cold
/// run starts from an empty cache; the warm run follows it on the same
/// cache. Flat timings include flattening.
pub fn bench_model(g: &Generated, p: &GenParams, repeats: usize) -> Result<BenchRow, GenError> {
    let opts = AnalysisOptions {
        localize: false,
        ..AnalysisOptions::default()
    };
    let repeats = repeats.max(1);
    let (mut flat, mut cold, mut warm) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..repeats {
        flat.push(timed(|| analyze_flat(&g.registry, opts))?);
        let cache = DecompositionCache::new();
        cold.push(timed(|| analyze(&g.registry, &cache, opts))?);
        warm.push(timed(|| analyze(&g.registry, &cache, opts))?);
    }
    Ok(BenchRow {
        seed: p.seed,
        n_total: g.n_total,
        k: p.k,
        r: p.r,
        kind: p.kind,
        t_flat_ms: median(&mut flat),
        t_hier_cold_ms: median(&mut cold),
        t_hier_warm_ms: median(&mut warm),
        achieved_r: g.achieved_r,
    })
}

/// Grid points run one after another so timings do not compete.
pub fn bench(grid: &[GenParams], repeats: usize) -> Result<Vec<BenchRow>, GenError> {
    grid.iter()
        .map(|p| bench_model(&generate_model(p)?, p, repeats))
        .collect()
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Generate with `p`, shrinking the per-component budget until the
/// flattened model has at most `max_nodes` nodes.
pub fn generate_bounded(p: &GenParams, max_nodes: usize) -> Result<(Generated, GenParams), GenError> {
    let mut p = p.clone();
    loop {
        let g = generate_model(&p)?;
        if g.n_total <= max_nodes || p.n_per_component <= 4 {
            return Ok((g, p));
        }
        p.n_per_component = (p.n_per_component * 3 / 4).max(4);
    }
}

/// Random suite parameters: `k ≤ 10`, `levels ≤ 3`, `r ≤ 0.3`, sized for
/// roughly `max_nodes` flattened nodes.
pub fn suite_params(kind: ModelKind, count: usize, seed: u64, max_nodes: usize) -> Vec<GenParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=10);
            let levels = rng.gen_range(1..=3);
            let branching: usize = 2;
            let leaves = k * branching.pow(levels as u32 - 1);
            let n_per_component = (max_nodes / (leaves + 1)).clamp(6, 60);
            GenParams {
                n_per_component: rng.gen_range(n_per_component / 2..=n_per_component),
                k,
                r: rng.gen_range(0.0..=0.3),
                c0: rng.gen_range(2.0..=6.0),
                levels,
                kind,
                seed: rng.gen(),
                branching,
                pool: 0,
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub params: GenParams,
    pub n_total: usize,
    pub singular: bool,
    pub verdict: Verdict,
}

/// Compare hierarchical and flat analysis on each generated model.
pub fn equivalence_suite(
    params: &[GenParams],
    max_nodes: usize,
    parallel: bool,
) -> Vec<Result<SuiteCase, GenError>> {
    let run = |p: &GenParams| -> Result<SuiteCase, GenError> {
        let (g, params) = generate_bounded(p, max_nodes)?;
        let opts = AnalysisOptions::default();
        let hier = analyze(&g.registry, &DecompositionCache::new(), opts)?;
        let flat = analyze_flat(&g.registry, opts)?;
        Ok(SuiteCase {
            params,
            n_total: g.n_total,
            singular: flat.singular,
            verdict: check_equivalence(&hier, &flat, p.kind),
        })
    };
    if parallel {
        params.par_iter().map(run).collect()
    } else {
        params.iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn bench_rows_serialize_with_header() {
        let p = GenParams {
            n_per_component: 12,
            k: 2,
            ..GenParams::default()
        };
        let rows = bench(std::slice::from_ref(&p), 1).unwrap();
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("seed,n_total,k,r,kind,t_flat_ms,t_hier_cold_ms,t_hier_warm_ms,achieved_r")
        );
        assert!(lines.next().unwrap().starts_with("0,"));
    }

    #[test]
    fn suite_params_respect_bounds() {
        for p in suite_params(ModelKind::Nlae, 50, 1, 500) {
            assert!((1..=10).contains(&p.k) && (1..=3).contains(&p.levels));
            assert!(p.r <= 0.3);
        }
    }

    #[test]
    fn bounded_generation_shrinks() {
        let p = GenParams {
            n_per_component: 200,
            k: 10,
            levels: 2,
            ..GenParams::default()
        };
        let (g, q) = generate_bounded(&p, 500).unwrap();
        assert!(g.n_total <= 500, "{}", g.n_total);
        assert!(q.n_per_component < 200);
    }
}
