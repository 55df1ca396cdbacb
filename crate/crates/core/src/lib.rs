//! Compressed-sensing designs from unbalanced expander graphs.
//!
//! The crate builds left-regular bipartite graphs (random or code-based),
//! turns them into renormalized adjacency matrices, certifies expansion and
//! the derived l1 conditions, solves the lasso, Dantzig selector and basis
//! pursuit, and runs Monte Carlo experiments against the oracle inequalities
//! these designs satisfy.

pub mod design;
pub mod error;
pub mod experiment;
pub mod field;
pub mod graph;
pub mod noise;
pub mod rng;
pub mod solve;
pub mod vecops;
pub mod verify;

pub use nalgebra;

pub use design::{Design, DesignMatrix};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldOp, FieldPoly, FieldSpec};
pub use graph::{BipartiteGraph, ExpanderParams, Provenance};
pub use noise::{Correlation, NoiseModel, Thresholds};
pub use verify::{ExpansionCertificate, VerificationReport, Witness};
