use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::model::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hierarchical,
    Flat,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSets {
    pub variables: Vec<String>,
    pub equations: Vec<String>,
}

/// An exposed variable of a DAE together with the variables reachable from
/// it along feasible paths; any one of them may take the initial condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitSuggestion {
    pub variable: String,
    pub alternatives: Vec<String>,
}

/// Over-constrained equations traced back into one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedOver {
    pub instance: String,
    pub equations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub model: String,
    pub mode: Mode,
    pub kind: ModelKind,
    pub singular: bool,
    pub over_equations: Vec<String>,
    pub over_variables: Vec<String>,
    pub exposed_variables: Vec<String>,
    pub under: NodeSets,
    pub well: NodeSets,
    pub well_count: usize,
    pub init_suggestions: Vec<InitSuggestion>,
    pub diff_counts: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub localized_over: Vec<LocalizedOver>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnalysisReport {
    /// Equal apart from timings.
    pub fn same_result(&self, other: &AnalysisReport) -> bool {
        let mut a = self.clone();
        a.timings_ms = other.timings_ms.clone();
        &a == other
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = if self.singular {
            "structurally singular"
        } else {
            "structurally well-posed"
        };
        let mode = match self.mode {
            Mode::Hierarchical => "hierarchical",
            Mode::Flat => "flat",
        };
        let _ = writeln!(s, "model {} ({}, {mode}): {status}", self.model, self.kind);
        let list = |v: &[String]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.join(", ")
            }
        };
        let _ = writeln!(s, "over-constrained equations: {}", list(&self.over_equations));
        let _ = writeln!(s, "over-constrained variables: {}", list(&self.over_variables));
        let _ = writeln!(s, "exposed variables: {}", list(&self.exposed_variables));
        let _ = writeln!(
            s,
            "under-constrained: {} variables, {} equations",
            self.under.variables.len(),
            self.under.equations.len()
        );
        let _ = writeln!(s, "well-constrained nodes: {}", self.well_count);
        for l in &self.localized_over {
            let _ = writeln!(s, "over-constrained in {}: {}", l.instance, list(&l.equations));
        }
        if !self.diff_counts.is_empty() {
            let d: Vec<String> = self.diff_counts.iter().map(|(k, n)| format!("{k}:{n}")).collect();
            let _ = writeln!(s, "differentiated: {}", d.join(", "));
        }
        if !self.init_suggestions.is_empty() {
            let _ = writeln!(s, "initial conditions (pick one per line):");
            for g in &self.init_suggestions {
                let mut opts = vec![g.variable.clone()];
                opts.extend(g.alternatives.iter().cloned());
                let _ = writeln!(s, "  {}", opts.join(" | "));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AnalysisReport {
        AnalysisReport {
            model: "m".into(),
            mode: Mode::Flat,
            kind: ModelKind::Dae,
            singular: false,
            over_equations: vec![],
            over_variables: vec![],
            exposed_variables: vec!["x".into()],
            under: NodeSets {
                variables: vec!["x".into(), "x'".into()],
                equations: vec!["f".into()],
            },
            well: NodeSets::default(),
            well_count: 0,
            init_suggestions: vec![InitSuggestion {
                variable: "x".into(),
                alternatives: vec!["x'".into()],
            }],
            diff_counts: BTreeMap::new(),
            localized_over: vec![],
            timings_ms: [("total".to_string(), 0.5)].into(),
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: AnalysisReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"mode\": \"flat\""));
    }

    #[test]
    fn timings_do_not_affect_result() {
        let a = sample();
        let mut b = sample();
        b.timings_ms.insert("total".into(), 99.0);
        assert!(a.same_result(&b));
        b.singular = true;
        assert!(!a.same_result(&b));
    }

    #[test]
    fn text_lists_suggestions() {
        let t = sample().to_text();
        assert!(t.contains("x | x'"));
        assert!(t.contains("well-posed"));
    }
}
