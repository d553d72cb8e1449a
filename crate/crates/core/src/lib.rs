//! Minimal flow diagrams for sets of state sequences.
//!
//! A flow diagram is a node-labelled DAG with a source `s` and a sink `t`.
//! Each input sequence must be segmentable so that its segments, in order,
//! fulfil the criteria along some `s`–`t` path. The solvers here find
//! diagrams with as few nodes as possible.

pub mod bench;
pub mod criteria;
pub mod criterion;
pub mod datagen;
pub mod dataset;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod frontier;
pub mod grid;
pub mod heuristic;
pub mod model;
pub mod resources;
pub mod solve;
pub mod validate;

pub use criterion::{Criterion, CriterionDescriptor, CriterionFlags, Instance};
pub use dataset::{CriterionKind, CriterionSpec, Dataset, DiagramFile};
pub use diagram::{fd_size, from_path, to_dot, DotOptions, FlowDiagram};
pub use error::{BudgetKind, Error, Result};
pub use grid::{dominates, maximal_set, FilterMode, GridVertex};
pub use model::{Certificate, SegmentRef, State, StateSequence};
pub use solve::{solve, Algorithm, Solution, SolveOptions, SolveStats};
pub use validate::{validate, Violation};
