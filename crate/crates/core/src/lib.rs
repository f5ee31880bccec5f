//! Analysis of labeled graph spaces: the accommodating family, its
//! dynamics, hereditary saturated cores and their quotients, and verdicts on
//! simplicity, pure infiniteness and the ideal property of the associated
//! algebra.

pub mod analysis;
pub mod config;
pub mod dot;
pub mod dynamics;
pub mod error;
pub mod fuzz;
pub mod graph;
pub mod ideals;
pub mod oracle;
pub mod report;
pub mod space;
pub mod verdict;

pub use config::{Config, CoverMode};
pub use error::{AnalysisError, ErrorKind, GraphError, Result};
pub use graph::{LabeledGraph, Letter, Limits, VertexSet, Word};
pub use space::Space;
