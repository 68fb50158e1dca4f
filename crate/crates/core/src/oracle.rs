//! The flattening path used as a reference, and the comparison between its
//! reports and the hierarchical ones.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::flatten::flatten;
use crate::hier::{analysis_kind, AnalysisOptions};
use crate::model::{ModelKind, Registry};
use crate::report::{AnalysisReport, Mode};
use crate::system::{report_for, solve, EquationSystem};

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Flatten the root and analyse the result as one equation system.
pub fn analyze_flat(registry: &Registry, opts: AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let start = Instant::now();
    analysis_kind(registry)?;
    let root = registry.root_def();
    let flat = flatten(root, registry);
    let sys = EquationSystem::from_flat(&flat);
    let t_flatten = ms_since(start);
    let t = Instant::now();
    let solved = solve(&sys, opts.cap)?;
    let mut report = report_for(&root.name, Mode::Flat, &solved);
    report.timings_ms.insert("flatten".into(), t_flatten);
    report.timings_ms.insert("root".into(), ms_since(t));
    report.timings_ms.insert("total".into(), ms_since(start));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub equivalent: bool,
    /// First violated clause: `classification`, `over`, `under`,
    /// `over_presence`, `dof` or `connectivity`.
    pub clause: Option<String>,
    pub detail: String,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            equivalent: true,
            clause: None,
            detail: String::new(),
        }
    }

    pub fn fail(clause: &str, detail: String) -> Self {
        Verdict {
            equivalent: false,
            clause: Some(clause.to_string()),
            detail,
        }
    }
}

fn set(v: &[String]) -> BTreeSet<&str> {
    v.iter().map(String::as_str).collect()
}

fn show(s: &BTreeSet<&str>) -> String {
    s.iter().copied().collect::<Vec<_>>().join(", ")
}

/// Compare a hierarchical and a flat report of the same model.
///
/// NLAE: same classification, same under-constrained nodes, and the same
/// over-constrained nodes among those the hierarchical report can see
/// (well-constrained component internals never reach the dummy model).
///
/// DAE: same classification and presence of an over part; for well-posed
/// models also the same number of exposed variables, and every
/// hierarchically exposed variable lies in the flat under part, i.e. is
/// joined to a flat exposed variable by a feasible path.
pub fn check_equivalence(hier: &AnalysisReport, flat: &AnalysisReport, kind: ModelKind) -> Verdict {
    if hier.singular != flat.singular {
        return Verdict::fail(
            "classification",
            format!("hierarchical singular={}, flat singular={}", hier.singular, flat.singular),
        );
    }
    match kind {
        ModelKind::Nlae => {
            let visible: BTreeSet<&str> = [
                &hier.over_equations,
                &hier.over_variables,
                &hier.under.variables,
                &hier.under.equations,
                &hier.well.variables,
                &hier.well.equations,
            ]
            .into_iter()
            .flat_map(|v| v.iter().map(String::as_str))
            .collect();
            let hier_over: BTreeSet<&str> =
                set(&hier.over_equations).union(&set(&hier.over_variables)).copied().collect();
            let flat_over: BTreeSet<&str> = set(&flat.over_equations)
                .union(&set(&flat.over_variables))
                .copied()
                .filter(|n| visible.contains(n))
                .collect();
            if hier_over != flat_over {
                return Verdict::fail(
                    "over",
                    format!("hierarchical [{}] vs flat [{}]", show(&hier_over), show(&flat_over)),
                );
            }
            let hu: BTreeSet<&str> =
                set(&hier.under.variables).union(&set(&hier.under.equations)).copied().collect();
            let fu: BTreeSet<&str> =
                set(&flat.under.variables).union(&set(&flat.under.equations)).copied().collect();
            if hu != fu {
                let only_h: BTreeSet<&str> = hu.difference(&fu).copied().collect();
                let only_f: BTreeSet<&str> = fu.difference(&hu).copied().collect();
                return Verdict::fail(
                    "under",
                    format!("only hierarchical [{}], only flat [{}]", show(&only_h), show(&only_f)),
                );
            }
        }
        ModelKind::Dae => {
            let (ho, fo) = (!hier.over_equations.is_empty(), !flat.over_equations.is_empty());
            if ho != fo {
                return Verdict::fail(
                    "over_presence",
                    format!("hierarchical over part present={ho}, flat={fo}"),
                );
            }
            // Degrees of freedom are only meaningful for a consistent system.
            if hier.singular {
                return Verdict::pass();
            }
            let (hd, fd) = (hier.exposed_variables.len(), flat.exposed_variables.len());
            if hd != fd {
                return Verdict::fail(
                    "dof",
                    format!("hierarchical exposes {hd} variables, flat exposes {fd}"),
                );
            }
            let flat_under = set(&flat.under.variables);
            if let Some(v) = hier.exposed_variables.iter().find(|v| !flat_under.contains(v.as_str())) {
                return Verdict::fail(
                    "connectivity",
                    format!("`{v}` is not joined to any flat exposed variable"),
                );
            }
        }
    }
    Verdict::pass()
}
