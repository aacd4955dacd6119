//! Derivative-free global optimization by integer labeling of adaptively
//! subdivided grids.
//!
//! The search keeps a set of axis-aligned cells, labels every cell corner
//! with an integer in [0, n] derived from where the objective improves,
//! keeps the cells whose corners carry all n+1 labels, and halves them.
//! Corner coordinates are held exactly as dyadic fractions, so a vertex
//! shared between cells or refinement levels is one key in the evaluation
//! memo no matter how it was reached.
//!
//! Start with [`engine::run`] or the runnable programs under `examples/`;
//! the `slm` binary wraps the same harness for single runs, baseline
//! comparisons, and worker-sweep timing tables.

pub mod backend;
pub mod bench;
pub mod engine;
pub mod error;
pub mod grid;
pub mod harness;
pub mod labeling;
pub mod registry;

pub use backend::{assign, master_round, merge_outcomes, ExecutionBackend, WorkAssignment};
pub use engine::{run, Engine, EngineConfig, FinalPoint, GenerationTrace, RunReport};
pub use error::{Result, SlmError};
pub use grid::{format_coords, Cell, DyadicPoint, Label, SearchDomain, MAX_LEVEL};
pub use labeling::{LabelingStrategy, Objective, Sense};
pub use registry::{ClusterTables, EvalStore};
