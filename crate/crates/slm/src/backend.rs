use serde::Serialize;
use std::collections::BTreeMap;
use std::thread;

use crate::error::{Result, SlmError};
use crate::grid::{Cell, DyadicPoint};
use crate::labeling::{label_vertex, LabelContext, PointEvaluator, VertexOutcome};
use crate::registry::{EvalStore, ScratchEvaluator};

/// How a generation's cells get labeled.
///
/// Parallel and Clustered both fan cells out to a worker pool; they differ
/// only in evaluation routing. Parallel workers evaluate per cell with no
/// cross-cell sharing, Clustered workers go through the shared memo store
/// so a point shared by two cells is evaluated once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExecutionBackend {
    Serial,
    Parallel { workers: usize },
    Clustered { workers: usize },
}

impl ExecutionBackend {
    pub fn workers(&self) -> usize {
        match self {
            ExecutionBackend::Serial => 1,
            ExecutionBackend::Parallel { workers } | ExecutionBackend::Clustered { workers } => {
                *workers
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExecutionBackend::Serial => "serial",
            ExecutionBackend::Parallel { .. } => "parallel",
            ExecutionBackend::Clustered { .. } => "clustered",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers() == 0 {
            return Err(SlmError::Config("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Round-robin split of cell indices over `workers` pools.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkAssignment {
    pub per_worker: Vec<Vec<usize>>,
}

pub fn assign(cell_count: usize, workers: usize) -> WorkAssignment {
    assert!(workers >= 1);
    let mut per_worker = vec![Vec::new(); workers];
    for i in 0..cell_count {
        per_worker[i % workers].push(i);
    }
    WorkAssignment { per_worker }
}

/// One worker's results for one assigned cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLabels {
    /// Outcomes in the cell's corner order.
    pub outcomes: Vec<VertexOutcome>,
    /// Objective invocations made through a per-cell scratch memo; zero
    /// when the shared store did the evaluating.
    pub objective_calls: u64,
}

/// Everything one worker sends back.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelBatch {
    pub worker: usize,
    /// (cell index, labels) pairs covering exactly the assigned cells.
    pub cells: Vec<(usize, CellLabels)>,
}

fn label_one_cell(
    cell: &Cell,
    ctx: &LabelContext<'_>,
    evaluator: &dyn PointEvaluator,
) -> Result<Vec<VertexOutcome>> {
    cell.vertices()
        .iter()
        .map(|v| label_vertex(ctx, evaluator, v, cell.level()))
        .collect()
}

fn worker_batch(
    worker: usize,
    indices: &[usize],
    cells: &[Cell],
    ctx: &LabelContext<'_>,
    shared: Option<&EvalStore>,
) -> Result<LabelBatch> {
    let mut out = Vec::with_capacity(indices.len());
    for &i in indices {
        let cell = &cells[i];
        let labels = match shared {
            Some(store) => CellLabels {
                outcomes: label_one_cell(cell, ctx, store)?,
                objective_calls: 0,
            },
            None => {
                let scratch = ScratchEvaluator::new(ctx.objective, ctx.domain);
                let outcomes = label_one_cell(cell, ctx, &scratch)?;
                CellLabels { outcomes, objective_calls: scratch.objective_calls() }
            }
        };
        out.push((i, labels));
    }
    Ok(LabelBatch { worker, cells: out })
}

/// Label every cell of a generation and gather the results in cell order.
/// The outcome is the same for every backend and worker count; only the
/// evaluation routing (and so the amount of duplicated work) differs.
pub fn master_round(
    cells: &[Cell],
    ctx: &LabelContext<'_>,
    backend: &ExecutionBackend,
    store: &EvalStore,
) -> Result<Vec<CellLabels>> {
    backend.validate()?;
    if cells.is_empty() {
        return Err(SlmError::Engine("no active cells to label".into()));
    }

    let batches: Vec<Result<LabelBatch>> = match backend {
        ExecutionBackend::Serial => {
            let all: Vec<usize> = (0..cells.len()).collect();
            vec![worker_batch(0, &all, cells, ctx, Some(store))]
        }
        ExecutionBackend::Parallel { workers } | ExecutionBackend::Clustered { workers } => {
            let shared = match backend {
                ExecutionBackend::Clustered { .. } => Some(store),
                _ => None,
            };
            let assignment = assign(cells.len(), *workers);
            thread::scope(|scope| {
                let handles: Vec<_> = assignment
                    .per_worker
                    .iter()
                    .enumerate()
                    .map(|(w, indices)| {
                        scope.spawn(move || worker_batch(w, indices, cells, ctx, shared))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("labeling worker panicked"))
                    .collect()
            })
        }
    };

    let mut merged: Vec<Option<CellLabels>> = vec![None; cells.len()];
    for batch in batches {
        let batch = batch?;
        for (i, labels) in batch.cells {
            merged[i] = Some(labels);
        }
    }
    Ok(merged
        .into_iter()
        .map(|slot| slot.expect("every cell labeled by exactly one worker"))
        .collect())
}

/// Fold per-cell outcomes into one record per distinct vertex. Shared
/// vertices produce identical outcomes in every cell that owns them, so
/// first-wins merging is well defined.
pub fn merge_outcomes(per_cell: &[CellLabels]) -> BTreeMap<DyadicPoint, VertexOutcome> {
    let mut merged = BTreeMap::new();
    for cell in per_cell {
        for outcome in &cell.outcomes {
            merged.entry(outcome.point.clone()).or_insert_with(|| outcome.clone());
        }
    }
    merged
}
