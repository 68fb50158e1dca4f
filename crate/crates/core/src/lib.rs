//! Structural analysis of hierarchical equation-oriented models.

pub mod bench;
pub mod cost;
pub mod error;
pub mod flatten;
pub mod gen;
pub mod graph;
pub mod hier;
pub mod model;
pub mod oracle;
pub mod parse;
pub mod reduction;
pub mod report;
pub mod system;
pub mod varset;
