use thiserror::Error;

/// Errors raised while reading or validating a model file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("root model `{0}` is not defined")]
    MissingRoot(String),
    #[error("instance `{instance}` in `{parent}` refers to undefined model `{def_name}`")]
    UnresolvedDef {
        parent: String,
        instance: String,
        def_name: String,
    },
    #[error("equation `{equation}` in `{def_name}` refers to unknown variable `{var}`")]
    UnresolvedVariable {
        def_name: String,
        equation: String,
        var: String,
    },
    #[error("duplicate {what} `{name}` in `{scope}`")]
    Duplicate {
        what: &'static str,
        name: String,
        scope: String,
    },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("equation `{equation}` in `{def_name}` has no occurrences")]
    EmptyEquation { def_name: String, equation: String },
    #[error("equation `{equation}` in `{def_name}` lists `{var}` twice")]
    DuplicateOccurrence {
        def_name: String,
        equation: String,
        var: String,
    },
    #[error("NLAE model `{def_name}` uses derivative `{var}` in `{equation}`")]
    DerivativeInNlae {
        def_name: String,
        equation: String,
        var: String,
    },
    #[error("cyclic instantiation: {}", .0.join(" -> "))]
    CyclicInstantiation(Vec<String>),
    #[error("NLAE model `{root}` instantiates DAE model `{def_name}`")]
    MixedKind { root: String, def_name: String },
}

/// Structural index reduction failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("derivative cap {cap} exceeded while differentiating {}", .chain.join(", "))]
    DerivativeCap { cap: u32, chain: Vec<String> },
}

/// A component whose decomposition found an over-constrained part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentViolation {
    pub instance_path: String,
    pub def_name: String,
    pub exposed_equations: Vec<String>,
}

impl std::fmt::Display for ComponentViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} ({}): over-constrained equations [{}]",
            self.instance_path,
            self.def_name,
            self.exposed_equations.join(", ")
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("over-constrained component `{}` (equations {})", .0.def_name, .0.exposed_equations.join(", "))]
    OverConstrainedComponent(ComponentViolation),
    #[error("{} over-constrained component(s): {}", .0.len(), .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ComponentViolations(Vec<ComponentViolation>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {nodes} nodes, above the enumeration bound {bound}")]
    BoundExceeded { nodes: usize, bound: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("could not build an over-free component `{def_name}` after {attempts} attempts")]
    Infeasible { def_name: String, attempts: u32 },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
