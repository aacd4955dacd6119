use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use crate::backend::{master_round, merge_outcomes, CellLabels, ExecutionBackend};
use crate::error::{Result, SlmError};
use crate::grid::{Cell, DyadicPoint, Label, SearchDomain, MAX_LEVEL};
use crate::labeling::{
    is_complete, Incumbent, LabelContext, LabelingStrategy, Objective, Sense, VertexOutcome,
};
use crate::registry::{ClusterTables, EvalStore};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineConfig {
    pub strategy: LabelingStrategy,
    pub sense: Sense,
    /// Stop before labeling a generation whose cells are at or below this
    /// step. At least one generation always runs.
    pub h_tolerance: Option<f64>,
    /// Hard cap on label-select-subdivide passes.
    pub max_generations: u32,
    /// Keep every completely labeled cell (true) or only the one with the
    /// best corner (false).
    pub multimodal: bool,
    /// Refinement floor; the run stops cleanly when cells cannot halve
    /// again without crossing it.
    pub max_level: u32,
    /// Let the gradient strategy fall back to finite differences when the
    /// objective has no analytic gradient.
    pub fd_fallback: bool,
    /// Finite-difference step as a fraction of each axis span.
    pub fd_step_rel: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            strategy: LabelingStrategy::BestNeighbor,
            sense: Sense::Min,
            h_tolerance: None,
            max_generations: 8,
            multimodal: true,
            max_level: MAX_LEVEL,
            fd_fallback: true,
            fd_step_rel: 1e-4,
        }
    }
}

/// One labeled vertex as it appears in traces and run output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexRecord {
    pub point: DyadicPoint,
    pub coords: Vec<f64>,
    pub value: f64,
    pub label: Label,
    pub mutated: Option<DyadicPoint>,
    pub mutated_coords: Option<Vec<f64>>,
    pub mutated_value: Option<f64>,
}

/// Everything one generation did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationTrace {
    pub generation: u32,
    /// Longest cell side at this generation.
    pub step: f64,
    pub cells: usize,
    /// Corner slots labeled: cells * 2^n.
    pub vertex_slots: usize,
    /// Distinct corner points among those slots.
    pub distinct_vertices: usize,
    /// True when no cell was completely labeled and selection kept the
    /// cell containing the best corner instead.
    pub fallback: bool,
    /// Merged per-vertex records, sorted by point.
    pub records: Vec<VertexRecord>,
    pub survivors: Vec<Cell>,
    /// Best evaluated point after this generation.
    pub solution: Incumbent,
}

/// Candidate answer extracted from one surviving cell of the final
/// generation: the best of its corners and their mutation targets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalPoint {
    pub cell: Cell,
    pub point: DyadicPoint,
    pub coords: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub domain: SearchDomain,
    pub config: EngineConfig,
    pub backend: ExecutionBackend,
    pub generations: Vec<GenerationTrace>,
    /// The frontier: cells that would be labeled next.
    pub final_cells: Vec<Cell>,
    /// Longest side among frontier cells.
    pub final_step: f64,
    /// One candidate per surviving cell of the last generation.
    pub final_points: Vec<FinalPoint>,
    /// Best of final_points.
    pub best: FinalPoint,
    /// Work measure: distinct corner points for serial and clustered
    /// backends, total corner slots for the parallel backend (which
    /// re-evaluates shared corners per cell).
    pub evaluations: u64,
    /// Distinct corner points registered over the whole run.
    pub unique_points: u64,
    /// Raw objective invocations, including half-step candidates.
    pub objective_calls: u64,
    pub wall_time_s: f64,
}

impl RunReport {
    /// Search-content equality: everything the subdivision decided, with
    /// timing and work counters (which legitimately differ between
    /// backends) left out.
    pub fn search_equal(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.generations == other.generations
            && self.final_cells == other.final_cells
            && self.final_points == other.final_points
            && self.best == other.best
    }

    /// Copy with the wall clock zeroed, for exact comparisons.
    pub fn timing_masked(&self) -> Self {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        r
    }

    pub fn last_survivors(&self) -> &[Cell] {
        self.generations.last().map(|t| t.survivors.as_slice()).unwrap_or(&[])
    }
}

/// Which active cells survive a labeled generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// Indices into the active cell list, ascending.
    pub survivors: Vec<usize>,
    pub fallback: bool,
}

/// Keep completely labeled cells: all of them (multimodal), or the one
/// whose best corner value wins (ties: first in lexicographic anchor
/// order). With no complete cell, keep the cell containing the best corner
/// and flag the generation.
pub fn select_cells(
    cells: &[Cell],
    labeled: &[CellLabels],
    sense: Sense,
    multimodal: bool,
) -> Selection {
    assert_eq!(cells.len(), labeled.len());
    let dim = cells[0].dim();
    let cell_labels = |i: usize| -> Vec<Label> {
        labeled[i].outcomes.iter().map(|o| o.label).collect()
    };
    let complete: Vec<usize> =
        (0..cells.len()).filter(|&i| is_complete(&cell_labels(i), dim)).collect();

    let best_corner_score = |i: usize| -> f64 {
        let mut best = f64::INFINITY;
        for o in &labeled[i].outcomes {
            let s = sense.score(o.value);
            if s.total_cmp(&best) == Ordering::Less {
                best = s;
            }
        }
        best
    };
    let argmin = |candidates: &[usize]| -> usize {
        let mut winner = None;
        for &i in candidates {
            let s = best_corner_score(i);
            let replace = match winner {
                None => true,
                Some((_, ws)) => s.total_cmp(&ws) == Ordering::Less,
            };
            if replace {
                winner = Some((i, s));
            }
        }
        winner.expect("at least one candidate cell").0
    };

    if complete.is_empty() {
        let all: Vec<usize> = (0..cells.len()).collect();
        return Selection { survivors: vec![argmin(&all)], fallback: true };
    }
    if multimodal {
        return Selection { survivors: complete, fallback: false };
    }
    Selection { survivors: vec![argmin(&complete)], fallback: false }
}

pub struct Engine {
    objective: Arc<dyn Objective>,
    domain: SearchDomain,
    config: EngineConfig,
    backend: ExecutionBackend,
}

impl Engine {
    pub fn new(
        objective: Arc<dyn Objective>,
        domain: SearchDomain,
        config: EngineConfig,
        backend: ExecutionBackend,
    ) -> Result<Self> {
        backend.validate()?;
        if domain.dim() > 20 {
            return Err(SlmError::Config(format!(
                "dimension {} too high: cells have 2^n corners",
                domain.dim()
            )));
        }
        if config.max_generations == 0 {
            return Err(SlmError::Config("max_generations must be at least 1".into()));
        }
        if config.max_level == 0 || config.max_level > MAX_LEVEL {
            return Err(SlmError::Config(format!(
                "max_level must lie in 1..={MAX_LEVEL}"
            )));
        }
        if let Some(tol) = config.h_tolerance {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(SlmError::Config("h tolerance must be positive".into()));
            }
        }
        if !config.fd_step_rel.is_finite() || config.fd_step_rel <= 0.0 {
            return Err(SlmError::Config("fd_step_rel must be positive".into()));
        }
        Ok(Self { objective, domain, config, backend })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn run(&self) -> Result<RunReport> {
        let start = Instant::now();
        let dim = self.domain.dim();
        let store = EvalStore::new(self.objective.clone(), self.domain.clone());
        let mut tables = ClusterTables::new(self.domain.clone());
        let mut active = vec![Cell::initial(dim)];
        let mut incumbent: Option<Incumbent> = None;
        let mut traces: Vec<GenerationTrace> = Vec::new();
        let mut last_round: Option<(Vec<Cell>, Vec<CellLabels>, Vec<usize>)> = None;
        let mut scratch_calls: u64 = 0;

        let mut g: u32 = 0;
        while g < self.config.max_generations {
            let step = active[0].step(&self.domain);
            if g > 0 {
                if let Some(tol) = self.config.h_tolerance {
                    if step <= tol {
                        break;
                    }
                }
            }
            for c in &active {
                tables.register_cell(c);
            }
            store.clear_labels();
            let ctx = LabelContext {
                objective: self.objective.as_ref(),
                domain: &self.domain,
                sense: self.config.sense,
                strategy: self.config.strategy,
                incumbent: incumbent.as_ref(),
                fd_fallback: self.config.fd_fallback,
                fd_step_rel: self.config.fd_step_rel,
            };
            let per_cell = master_round(&active, &ctx, &self.backend, &store)?;
            scratch_calls += per_cell.iter().map(|c| c.objective_calls).sum::<u64>();
            let merged = merge_outcomes(&per_cell);
            for (p, o) in &merged {
                store.record_label(p, o.label);
            }
            let selection =
                select_cells(&active, &per_cell, self.config.sense, self.config.multimodal);
            update_incumbent(&mut incumbent, &merged, &self.domain, self.config.sense);
            let solution = incumbent.clone().expect("labeling evaluated at least one point");

            let records = merged
                .values()
                .map(|o| VertexRecord {
                    point: o.point.clone(),
                    coords: self.domain.coords(&o.point),
                    value: o.value,
                    label: o.label,
                    mutated: o.mutated.clone(),
                    mutated_coords: o.mutated.as_ref().map(|m| self.domain.coords(m)),
                    mutated_value: o.mutated_value,
                })
                .collect();
            let survivors: Vec<Cell> =
                selection.survivors.iter().map(|&i| active[i].clone()).collect();
            traces.push(GenerationTrace {
                generation: g,
                step,
                cells: active.len(),
                vertex_slots: active.len() << dim,
                distinct_vertices: merged.len(),
                fallback: selection.fallback,
                records,
                survivors: survivors.clone(),
                solution,
            });
            last_round = Some((active.clone(), per_cell, selection.survivors));
            g += 1;

            if active[0].level() + 1 > self.config.max_level {
                // Cannot refine further; the survivors are the frontier.
                active = survivors;
                break;
            }
            let mut next = Vec::with_capacity(survivors.len() << dim);
            for s in &survivors {
                next.extend(s.subdivide(self.config.max_level)?);
            }
            next.sort();
            active = next;
        }

        let (last_active, last_per_cell, survivor_idx) =
            last_round.ok_or_else(|| SlmError::Engine("no generations executed".into()))?;
        let final_points: Vec<FinalPoint> = survivor_idx
            .iter()
            .map(|&i| {
                let mut best: Option<(&DyadicPoint, f64)> = None;
                for o in &last_per_cell[i].outcomes {
                    consider(&mut best, &o.point, o.value, self.config.sense);
                    if let (Some(m), Some(mv)) = (&o.mutated, o.mutated_value) {
                        consider(&mut best, m, mv, self.config.sense);
                    }
                }
                let (point, value) = best.expect("cell has corners");
                FinalPoint {
                    cell: last_active[i].clone(),
                    point: point.clone(),
                    coords: self.domain.coords(point),
                    value,
                }
            })
            .collect();
        let best = final_points
            .iter()
            .min_by(|a, b| {
                self.config
                    .sense
                    .score(a.value)
                    .total_cmp(&self.config.sense.score(b.value))
                    .then_with(|| a.point.cmp(&b.point))
            })
            .cloned()
            .expect("at least one surviving cell");

        let unique_points = tables.point_count() as u64;
        let evaluations = match self.backend {
            ExecutionBackend::Parallel { .. } => {
                traces.iter().map(|t| t.vertex_slots as u64).sum()
            }
            _ => unique_points,
        };
        Ok(RunReport {
            domain: self.domain.clone(),
            config: self.config.clone(),
            backend: self.backend,
            generations: traces,
            final_step: active[0].step(&self.domain),
            final_cells: active,
            final_points,
            best,
            evaluations,
            unique_points,
            objective_calls: store.objective_calls() + scratch_calls,
            wall_time_s: start.elapsed().as_secs_f64(),
        })
    }
}

/// Replace `best` when (point, value) wins under `sense`; value ties break
/// toward the smaller point.
fn consider<'a>(
    best: &mut Option<(&'a DyadicPoint, f64)>,
    point: &'a DyadicPoint,
    value: f64,
    sense: Sense,
) {
    let replace = match best {
        None => true,
        Some((bp, bv)) => match sense.score(value).total_cmp(&sense.score(*bv)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => point < *bp,
        },
    };
    if replace {
        *best = Some((point, value));
    }
}

fn update_incumbent(
    incumbent: &mut Option<Incumbent>,
    merged: &BTreeMap<DyadicPoint, VertexOutcome>,
    domain: &SearchDomain,
    sense: Sense,
) {
    let mut best: Option<(&DyadicPoint, f64)> = None;
    for o in merged.values() {
        consider(&mut best, &o.point, o.value, sense);
        if let (Some(m), Some(mv)) = (&o.mutated, o.mutated_value) {
            consider(&mut best, m, mv, sense);
        }
    }
    let Some((point, value)) = best else { return };
    let replace = match incumbent {
        None => true,
        Some(inc) => match sense.score(value).total_cmp(&sense.score(inc.value)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => *point < inc.point,
        },
    };
    if replace {
        *incumbent = Some(Incumbent { point: point.clone(), coords: domain.coords(point), value });
    }
}

/// Build and run an engine in one call.
pub fn run(
    objective: Arc<dyn Objective>,
    domain: SearchDomain,
    config: EngineConfig,
    backend: ExecutionBackend,
) -> Result<RunReport> {
    Engine::new(objective, domain, config, backend)?.run()
}
