use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hsa_core::bench::{bench, write_bench_csv};
use hsa_core::cost::{cost_curves, write_curves_csv};
use hsa_core::error::AnalysisError;
use hsa_core::flatten::flatten;
use hsa_core::gen::{generate_model, GenParams};
use hsa_core::graph::graph_to_dot;
use hsa_core::hier::{analysis_kind, analyze, AnalysisOptions, DecompositionCache};
use hsa_core::model::{ModelKind, Registry, DEFAULT_DERIVATIVE_CAP};
use hsa_core::oracle::{analyze_flat, check_equivalence, Verdict};
use hsa_core::parse::{parse_model, to_json};
use hsa_core::report::AnalysisReport;
use hsa_core::system::{solve, EquationSystem};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_SINGULAR: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "hsa", version, about = "Structural analysis of hierarchical equation models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a model and list its over- and under-constrained parts.
    Analyze(AnalyzeArgs),
    /// Run the hierarchical and the flat analysis and compare them.
    Diff(DiffArgs),
    /// Write a random hierarchical model as JSON.
    Gen(GenArgs),
    /// Time flat against hierarchical analysis over a parameter grid.
    Bench(BenchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    path: PathBuf,
    /// Analyse the flattened model.
    #[arg(long, conflicts_with = "hier")]
    flat: bool,
    /// Analyse component by component (default).
    #[arg(long)]
    hier: bool,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// Write the flattened incidence graph as DOT into this directory.
    #[arg(long, value_name = "DIR")]
    dot: Option<PathBuf>,
    /// Decompose sibling components in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct DiffArgs {
    path: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nlae,
    Dae,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Nlae => ModelKind::Nlae,
            KindArg::Dae => ModelKind::Dae,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Nodes per leaf definition.
    #[arg(short = 'n', long, default_value_t = 40)]
    n_per_component: usize,
    /// Components of the root.
    #[arg(short, long, default_value_t = 4)]
    k: usize,
    /// Target under-constrained share of each component.
    #[arg(short, long, default_value_t = 0.1)]
    r: f64,
    /// Target average node degree.
    #[arg(long, default_value_t = 6.0)]
    c0: f64,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    #[arg(long, default_value_t = 2)]
    branching: usize,
    /// Distinct definitions per level, 0 for automatic reuse.
    #[arg(long, default_value_t = 0)]
    pool: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Nlae)]
    kind: KindArg,
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Nodes per leaf definition, one grid axis.
    #[arg(short = 'n', long, value_delimiter = ',', default_values_t = [100usize, 400])]
    n_per_component: Vec<usize>,
    #[arg(short, long, value_delimiter = ',', default_values_t = [2usize, 10])]
    k: Vec<usize>,
    #[arg(short, long, value_delimiter = ',', default_values_t = [0.05, 0.3])]
    r: Vec<f64>,
    #[arg(long, default_value_t = 6.0)]
    c0: f64,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Nlae)]
    kind: KindArg,
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write predicted operation counts over the same grid.
    #[arg(long, value_name = "CSV")]
    cost_curves: Option<PathBuf>,
}

fn derivative_cap() -> Result<u32> {
    match std::env::var("HSA_DERIV_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("HSA_DERIV_CAP={v} is not a count")),
        Err(_) => Ok(DEFAULT_DERIVATIVE_CAP),
    }
}

fn load(path: &Path) -> Result<Registry> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let reg = parse_model(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(reg)
}

/// Input errors are usage failures; anything the analysis itself finds
/// wrong with the model counts as singular.
fn failure_code(e: &AnalysisError) -> u8 {
    match e {
        AnalysisError::Model(_) => EXIT_USAGE,
        _ => EXIT_SINGULAR,
    }
}

fn write_dot(dir: &Path, reg: &Registry, cap: u32) -> Result<()> {
    let root = reg.root_def();
    let sys = EquationSystem::from_flat(&flatten(root, reg));
    let solved = solve(&sys, cap)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{}.dot", root.name));
    let dot = graph_to_dot(&solved.graph, Some(&solved.matching), Some(&solved.partition()));
    fs::write(&path, dot).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<u8> {
    let reg = load(&a.path)?;
    let opts = AnalysisOptions {
        cap: derivative_cap()?,
        parallel: a.parallel,
        ..AnalysisOptions::default()
    };
    let result = if a.flat {
        analyze_flat(&reg, opts)
    } else {
        analyze(&reg, &DecompositionCache::new(), opts)
    };
    let report: AnalysisReport = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hsa: {e}");
            return Ok(failure_code(&e));
        }
    };
    if a.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(dir) = &a.dot {
        write_dot(dir, &reg, opts.cap)?;
    }
    Ok(if report.singular { EXIT_SINGULAR } else { EXIT_OK })
}

fn cmd_diff(a: &DiffArgs) -> Result<u8> {
    let reg = load(&a.path)?;
    let kind = analysis_kind(&reg)?;
    let opts = AnalysisOptions {
        cap: derivative_cap()?,
        inject_fault: a.inject_fault,
        ..AnalysisOptions::default()
    };
    let flat = match analyze_flat(&reg, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hsa: {e}");
            return Ok(failure_code(&e));
        }
    };
    let verdict = match analyze(&reg, &DecompositionCache::new(), opts) {
        Ok(hier) => check_equivalence(&hier, &flat, kind),
        // A rejected component means the flattened model must be singular too.
        Err(AnalysisError::ComponentViolations(v)) if flat.singular => {
            eprintln!("hsa: {} over-constrained component(s)", v.len());
            Verdict::pass()
        }
        Err(e) => Verdict::fail(
            "classification",
            format!("hierarchical analysis failed on a well-posed model: {e}"),
        ),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&verdict)?);
    } else if verdict.equivalent {
        println!("equivalent");
    } else {
        println!(
            "mismatch in {}: {}",
            verdict.clause.as_deref().unwrap_or("?"),
            verdict.detail
        );
    }
    Ok(if verdict.equivalent { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_gen(a: &GenArgs) -> Result<u8> {
    let p = GenParams {
        n_per_component: a.n_per_component,
        k: a.k,
        r: a.r,
        c0: a.c0,
        levels: a.levels,
        kind: a.kind.into(),
        seed: a.seed,
        branching: a.branching,
        pool: a.pool,
    };
    let g = generate_model(&p)?;
    fs::write(&a.output, to_json(&g.registry)).with_context(|| format!("writing {}", a.output.display()))?;
    eprintln!(
        "wrote {} ({} nodes, under share {:.3})",
        a.output.display(),
        g.n_total,
        g.achieved_r
    );
    Ok(EXIT_OK)
}

fn cmd_bench(a: &BenchArgs) -> Result<u8> {
    let mut grid = Vec::new();
    for &n in &a.n_per_component {
        for &k in &a.k {
            for &r in &a.r {
                grid.push(GenParams {
                    n_per_component: n,
                    k,
                    r,
                    c0: a.c0,
                    levels: a.levels,
                    kind: a.kind.into(),
                    seed: a.seed,
                    ..GenParams::default()
                });
            }
        }
    }
    let rows = bench(&grid, a.repeats)?;
    let file = fs::File::create(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    write_bench_csv(&rows, file)?;
    if let Some(path) = &a.cost_curves {
        let points: Vec<_> = rows
            .iter()
            .flat_map(|row| cost_curves(&[row.n_total as f64], &[row.k], &[row.r], a.c0))
            .collect();
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_curves_csv(&points, file)?;
    }
    Ok(EXIT_OK)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Diff(a) => cmd_diff(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hsa: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
