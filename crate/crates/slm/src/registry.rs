use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Result, SlmError};
use crate::grid::{format_coords, Cell, DyadicPoint, Label, SearchDomain};
use crate::labeling::{Objective, PointEvaluator};

/// Bidirectional point/cell bookkeeping: which cells own a grid point, and
/// which points a cell owns. Cell ids are 1-based in registration order.
#[derive(Debug, Clone)]
pub struct ClusterTables {
    domain: SearchDomain,
    point_to_cells: BTreeMap<DyadicPoint, BTreeSet<u64>>,
    cell_to_points: BTreeMap<u64, BTreeSet<DyadicPoint>>,
    ids: BTreeMap<Cell, u64>,
    next_id: u64,
}

impl ClusterTables {
    pub fn new(domain: SearchDomain) -> Self {
        Self {
            domain,
            point_to_cells: BTreeMap::new(),
            cell_to_points: BTreeMap::new(),
            ids: BTreeMap::new(),
            next_id: 1,
        }
    }

    /// Insert a cell and all its corners; returns the existing id when the
    /// cell was registered before.
    pub fn register_cell(&mut self, cell: &Cell) -> u64 {
        if let Some(&id) = self.ids.get(cell) {
            return id;
        }
        let id = self.next_id;
        self.next_id += 1;
        self.ids.insert(cell.clone(), id);
        let points: BTreeSet<DyadicPoint> = cell.vertices().into_iter().collect();
        for p in &points {
            self.point_to_cells.entry(p.clone()).or_default().insert(id);
        }
        self.cell_to_points.insert(id, points);
        id
    }

    pub fn cell_id(&self, cell: &Cell) -> Option<u64> {
        self.ids.get(cell).copied()
    }

    pub fn cells_of(&self, p: &DyadicPoint) -> Option<&BTreeSet<u64>> {
        self.point_to_cells.get(p)
    }

    pub fn points_of(&self, id: u64) -> Option<&BTreeSet<DyadicPoint>> {
        self.cell_to_points.get(&id)
    }

    /// Corner points two registered cells have in common.
    pub fn shared_points(&self, c1: u64, c2: u64) -> Result<BTreeSet<DyadicPoint>> {
        let a = self.cell_to_points.get(&c1).ok_or(SlmError::UnknownCluster(c1))?;
        let b = self.cell_to_points.get(&c2).ok_or(SlmError::UnknownCluster(c2))?;
        Ok(a.intersection(b).cloned().collect())
    }

    /// Distinct corner points across all registered cells.
    pub fn point_count(&self) -> usize {
        self.point_to_cells.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_to_points.len()
    }

    /// Points owned by two or more cells.
    pub fn shared_point_count(&self) -> usize {
        self.point_to_cells.values().filter(|ids| ids.len() >= 2).count()
    }

    /// CSV dump, one row per point, cluster ids comma-joined in one field.
    pub fn write_point_table<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["Point", "Cluster ID"])?;
        for (p, ids) in &self.point_to_cells {
            let ids: Vec<String> = ids.iter().map(u64::to_string).collect();
            wtr.write_record([format_coords(&self.domain.coords(p)), ids.join(",")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// CSV dump, one row per cell, corner points comma-joined in one field.
    pub fn write_cell_table<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["Cluster ID", "Point"])?;
        for (id, points) in &self.cell_to_points {
            let pts: Vec<String> =
                points.iter().map(|p| format_coords(&self.domain.coords(p))).collect();
            wtr.write_record([id.to_string(), pts.join(",")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Memoizing objective store keyed on canonical grid points. Safe for
/// concurrent lookup-or-insert; each point is evaluated at most once, with
/// concurrent requesters waiting on the first evaluation.
pub struct EvalStore {
    objective: Arc<dyn Objective>,
    domain: SearchDomain,
    memo: Mutex<HashMap<DyadicPoint, Arc<OnceLock<f64>>>>,
    labels: Mutex<HashMap<DyadicPoint, Label>>,
    unique: AtomicU64,
    calls: AtomicU64,
}

impl EvalStore {
    pub fn new(objective: Arc<dyn Objective>, domain: SearchDomain) -> Self {
        Self {
            objective,
            domain,
            memo: Mutex::new(HashMap::new()),
            labels: Mutex::new(HashMap::new()),
            unique: AtomicU64::new(0),
            calls: AtomicU64::new(0),
        }
    }

    pub fn domain(&self) -> &SearchDomain {
        &self.domain
    }

    /// Cached value, or evaluate-and-store on first request. Non-finite
    /// results are reported as errors and nothing is kept.
    pub fn eval(&self, p: &DyadicPoint) -> Result<f64> {
        let slot = {
            let mut memo = self.memo.lock().unwrap();
            memo.entry(p.clone()).or_default().clone()
        };
        // The objective runs outside the map lock so distinct points
        // evaluate concurrently; OnceLock serializes same-point racers.
        let mut fresh = false;
        let value = *slot.get_or_init(|| {
            fresh = true;
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.objective.value(&self.domain.coords(p))
        });
        if !value.is_finite() {
            self.memo.lock().unwrap().remove(p);
            return Err(SlmError::Evaluation { point: p.clone() });
        }
        if fresh {
            self.unique.fetch_add(1, Ordering::Relaxed);
        }
        Ok(value)
    }

    /// Cached value without evaluating.
    pub fn peek(&self, p: &DyadicPoint) -> Option<f64> {
        let memo = self.memo.lock().unwrap();
        memo.get(p).and_then(|slot| slot.get().copied())
    }

    /// Unique points evaluated so far; equals the memo size.
    pub fn unique_evaluations(&self) -> u64 {
        self.unique.load(Ordering::Relaxed)
    }

    /// Raw objective invocations (diagnostic; equals unique_evaluations
    /// unless evaluations failed).
    pub fn objective_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Labels ride along with values but only within one generation; the
    /// half-step neighborhood they depend on changes when cells shrink.
    pub fn record_label(&self, p: &DyadicPoint, label: Label) {
        self.labels.lock().unwrap().insert(p.clone(), label);
    }

    pub fn label_of(&self, p: &DyadicPoint) -> Option<Label> {
        self.labels.lock().unwrap().get(p).copied()
    }

    pub fn clear_labels(&self) {
        self.labels.lock().unwrap().clear();
    }
}

impl PointEvaluator for EvalStore {
    fn eval(&self, p: &DyadicPoint) -> Result<f64> {
        EvalStore::eval(self, p)
    }
}

/// Throwaway memo for labeling one cell in isolation: deduplicates within
/// the cell but shares nothing across cells.
pub struct ScratchEvaluator<'a> {
    objective: &'a dyn Objective,
    domain: &'a SearchDomain,
    memo: std::cell::RefCell<HashMap<DyadicPoint, f64>>,
    calls: AtomicU64,
}

impl<'a> ScratchEvaluator<'a> {
    pub fn new(objective: &'a dyn Objective, domain: &'a SearchDomain) -> Self {
        Self {
            objective,
            domain,
            memo: std::cell::RefCell::new(HashMap::new()),
            calls: AtomicU64::new(0),
        }
    }

    pub fn objective_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl PointEvaluator for ScratchEvaluator<'_> {
    fn eval(&self, p: &DyadicPoint) -> Result<f64> {
        if let Some(v) = self.memo.borrow().get(p) {
            return Ok(*v);
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        let value = self.objective.value(&self.domain.coords(p));
        if !value.is_finite() {
            return Err(SlmError::Evaluation { point: p.clone() });
        }
        self.memo.borrow_mut().insert(p.clone(), value);
        Ok(value)
    }
}
