use serde::Serialize;
use std::cmp::Ordering;

use crate::error::{Result, SlmError};
use crate::grid::{DyadicPoint, Label, SearchDomain};

/// Optimization direction. All internal comparisons go through `score`,
/// so maximization is minimization of the negated objective throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    pub fn score(self, value: f64) -> f64 {
        match self {
            Sense::Min => value,
            Sense::Max => -value,
        }
    }
}

impl std::str::FromStr for Sense {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Sense::Min),
            "max" => Ok(Sense::Max),
            other => Err(SlmError::Config(format!("sense must be min or max, got {other:?}"))),
        }
    }
}

/// Objective function over real coordinates. `gradient` is optional; the
/// gradient labeling strategy falls back to finite differences without it.
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Source of objective values at grid points. Implementations decide how
/// much to memoize; the labeling code is indifferent.
pub trait PointEvaluator {
    fn eval(&self, p: &DyadicPoint) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LabelingStrategy {
    /// Label from the displacement toward the best half-step neighbor.
    BestNeighbor,
    /// Label from the sign pattern of the gradient.
    Gradient,
}

impl std::str::FromStr for LabelingStrategy {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best-neighbor" => Ok(LabelingStrategy::BestNeighbor),
            "gradient" => Ok(LabelingStrategy::Gradient),
            other => Err(SlmError::Config(format!(
                "strategy must be best-neighbor or gradient, got {other:?}"
            ))),
        }
    }
}

/// Best evaluated point so far, frozen at generation start so labeling
/// order cannot influence results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Incumbent {
    pub point: DyadicPoint,
    pub coords: Vec<f64>,
    pub value: f64,
}

/// Everything label computation needs besides the vertex itself.
pub struct LabelContext<'a> {
    pub objective: &'a dyn Objective,
    pub domain: &'a SearchDomain,
    pub sense: Sense,
    pub strategy: LabelingStrategy,
    pub incumbent: Option<&'a Incumbent>,
    pub fd_fallback: bool,
    pub fd_step_rel: f64,
}

/// Half-step neighborhood of a vertex of a level-`cell_level` cell: indices
/// 2k + o on the next finer grid, o in {-1,0,1} per axis, clipped to the
/// domain. Lexicographic offset order (axis 0 most significant), so the
/// vertex itself sits in the middle of the list.
pub fn neighbor_candidates(vertex: &DyadicPoint, cell_level: u32) -> Vec<DyadicPoint> {
    let n = vertex.dim();
    let base = vertex
        .indices_at_level(cell_level + 1)
        .expect("vertex lies on the generation grid");
    let bound = 1u64 << (cell_level + 1);
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    'cand: for m in 0..3usize.pow(n as u32) {
        let mut k = Vec::with_capacity(n);
        let mut rem = m;
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            digits[i] = rem % 3;
            rem /= 3;
        }
        for (i, d) in digits.iter().enumerate() {
            let off = *d as i64 - 1;
            let ki = base[i] as i64 + off;
            if ki < 0 || ki as u64 > bound {
                continue 'cand;
            }
            k.push(ki as u64);
        }
        out.push(DyadicPoint::new(cell_level + 1, k));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestNeighbor {
    pub point: DyadicPoint,
    pub value: f64,
}

/// Pick the neighborhood minimum (under `sense`). Ties on value break
/// toward the candidate nearest the incumbent, then toward the earliest
/// candidate in lexicographic offset order.
pub fn best_neighbor(
    ctx: &LabelContext<'_>,
    evaluator: &dyn PointEvaluator,
    vertex: &DyadicPoint,
    cell_level: u32,
) -> Result<BestNeighbor> {
    let mut best: Option<(DyadicPoint, f64, f64, f64)> = None;
    for cand in neighbor_candidates(vertex, cell_level) {
        let value = evaluator.eval(&cand)?;
        let score = ctx.sense.score(value);
        let dist2 = match ctx.incumbent {
            Some(inc) => squared_distance(&ctx.domain.coords(&cand), &inc.coords),
            None => 0.0,
        };
        let better = match &best {
            None => true,
            Some((_, _, best_score, best_dist2)) => {
                match score.total_cmp(best_score) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => dist2.total_cmp(best_dist2) == Ordering::Less,
                }
            }
        };
        if better {
            best = Some((cand, value, score, dist2));
        }
    }
    let (point, value, _, _) = best.expect("neighborhood always contains the vertex");
    Ok(BestNeighbor { point, value })
}

/// Label from a descent displacement d: 0 when no coordinate decreases,
/// otherwise the highest 1-based axis index that does.
pub fn label_of_displacement(d: &[f64]) -> Label {
    let mut label = 0;
    for (i, di) in d.iter().enumerate() {
        if *di < 0.0 {
            label = i + 1;
        }
    }
    Label(label)
}

/// Central-difference gradient with relative step `step_rel` per axis,
/// one-sided at the domain boundary.
pub fn finite_difference_gradient(
    objective: &dyn Objective,
    domain: &SearchDomain,
    x: &[f64],
    step_rel: f64,
) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = step_rel * domain.span(i);
        let lo = domain.lower()[i];
        let hi = domain.upper()[i];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        let up_ok = x[i] + h <= hi;
        let down_ok = x[i] - h >= lo;
        let gi = if up_ok && down_ok {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            (objective.value(&xp) - objective.value(&xm)) / (2.0 * h)
        } else if up_ok {
            xp[i] = x[i] + h;
            (objective.value(&xp) - objective.value(x)) / h
        } else {
            xm[i] = x[i] - h;
            (objective.value(x) - objective.value(&xm)) / h
        };
        g.push(gi);
    }
    g
}

/// Value, label, and (for the best-neighbor strategy) the point the vertex
/// would move to.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexOutcome {
    pub point: DyadicPoint,
    pub value: f64,
    pub label: Label,
    pub mutated: Option<DyadicPoint>,
    pub mutated_value: Option<f64>,
}

pub fn label_vertex(
    ctx: &LabelContext<'_>,
    evaluator: &dyn PointEvaluator,
    vertex: &DyadicPoint,
    cell_level: u32,
) -> Result<VertexOutcome> {
    let value = evaluator.eval(vertex)?;
    match ctx.strategy {
        LabelingStrategy::BestNeighbor => {
            let bn = best_neighbor(ctx, evaluator, vertex, cell_level)?;
            let vc = ctx.domain.coords(vertex);
            let bc = ctx.domain.coords(&bn.point);
            let d: Vec<f64> = bc.iter().zip(&vc).map(|(b, v)| b - v).collect();
            let label = label_of_displacement(&d);
            Ok(VertexOutcome {
                point: vertex.clone(),
                value,
                label,
                mutated: Some(bn.point),
                mutated_value: Some(bn.value),
            })
        }
        LabelingStrategy::Gradient => {
            let x = ctx.domain.coords(vertex);
            let g = match ctx.objective.gradient(&x) {
                Some(g) => g,
                None if ctx.fd_fallback => {
                    finite_difference_gradient(ctx.objective, ctx.domain, &x, ctx.fd_step_rel)
                }
                None => {
                    return Err(SlmError::Config(
                        "gradient strategy needs an analytic gradient or the finite-difference fallback enabled".into(),
                    ))
                }
            };
            // Descent direction: downhill for Min, uphill for Max.
            let d: Vec<f64> = g
                .iter()
                .map(|gi| match ctx.sense {
                    Sense::Min => -gi,
                    Sense::Max => *gi,
                })
                .collect();
            let label = label_of_displacement(&d);
            Ok(VertexOutcome { point: vertex.clone(), value, label, mutated: None, mutated_value: None })
        }
    }
}

/// A cell is completely labeled when its corners carry every label 0..=n.
pub fn is_complete(labels: &[Label], dim: usize) -> bool {
    let mut seen = vec![false; dim + 1];
    for l in labels {
        if l.0 <= dim {
            seen[l.0] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
