//! Hierarchical structural analysis: component decomposition, dummy models
//! and the bottom-up analysis driver.

mod analyze;
mod cache;
mod decompose;
mod dummy;

pub use analyze::{analysis_kind, analyze, localize_component_over, AnalysisOptions};
pub use cache::DecompositionCache;
pub use decompose::{
    decompose_dae, decompose_nlae, decompose_system, under_closure, ComponentDecomposition,
    UnderPart,
};
pub use dummy::{build_dummy, build_dummy_dae, build_dummy_nlae, DummyModel};
