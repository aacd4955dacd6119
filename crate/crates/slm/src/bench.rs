use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Duration;

use crate::error::{Result, SlmError};
use crate::grid::SearchDomain;
use crate::labeling::{Objective, Sense};

/// A named objective with its canonical box and known answer.
#[derive(Clone)]
pub struct BenchFunction {
    pub name: &'static str,
    pub objective: Arc<dyn Objective>,
    pub domain: SearchDomain,
    pub minimizers: Vec<Vec<f64>>,
    pub min_value: f64,
    /// Absolute tolerance for the load-time minimizer check.
    pub min_tolerance: f64,
    /// Generations the reference experiments use.
    pub default_generations: u32,
}

impl BenchFunction {
    /// Check the stated minimizer/minimum against the code.
    pub fn validate(&self) -> Result<()> {
        for m in &self.minimizers {
            let v = self.objective.value(m);
            if (v - self.min_value).abs() > self.min_tolerance {
                return Err(SlmError::Config(format!(
                    "function {}: value {v} at the stated minimizer differs from {} by more than {}",
                    self.name, self.min_value, self.min_tolerance
                )));
            }
        }
        Ok(())
    }
}

/// Bowl with its bottom off center: x1^2 + (x2 - 0.4)^2.
pub struct F1;

impl Objective for F1 {
    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2);
        x[0] * x[0] + (x[1] - 0.4) * (x[1] - 0.4)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![2.0 * x[0], 2.0 * (x[1] - 0.4)])
    }
}

/// Easom: a needle at (pi, pi) in a flat plain; the far field underflows
/// to signed zero. No analytic gradient here on purpose, so runs exercise
/// the finite-difference fallback.
pub struct Easom;

impl Objective for Easom {
    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2);
        let d = (x[0] - PI) * (x[0] - PI) + (x[1] - PI) * (x[1] - PI);
        -x[0].cos() * x[1].cos() * (-d).exp()
    }
}

/// Rosenbrock banana: 100 (x1^2 - x2)^2 + (1 - x1)^2.
pub struct DejongF2;

impl Objective for DejongF2 {
    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2);
        let t = x[0] * x[0] - x[1];
        100.0 * t * t + (1.0 - x[0]) * (1.0 - x[0])
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let t = x[0] * x[0] - x[1];
        Some(vec![400.0 * x[0] * t - 2.0 * (1.0 - x[0]), -200.0 * t])
    }
}

/// The unsquared variant 100 (x1^2 - x2) + (1 - x1)^2. Unbounded below;
/// registered for demonstration only.
pub struct DejongF2Literal;

impl Objective for DejongF2Literal {
    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2);
        100.0 * (x[0] * x[0] - x[1]) + (1.0 - x[0]) * (1.0 - x[0])
    }
}

/// Shekel's foxholes: 25 wells on a 16-spaced grid, well i at
/// (base[i mod 5], base[i div 5]) with depth parameter i+1.
pub struct DejongF5;

const FOXHOLE_BASE: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

impl Objective for DejongF5 {
    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2);
        let mut sum = 0.002;
        for i in 0..25 {
            let d0 = x[0] - FOXHOLE_BASE[i % 5];
            let d1 = x[1] - FOXHOLE_BASE[i / 5];
            sum += 1.0 / ((i + 1) as f64 + d0.powi(6) + d1.powi(6));
        }
        1.0 / sum
    }
}

/// Same values, each evaluation blocked for `delay`: makes orchestration
/// cost visible at desk scale.
pub struct Delayed {
    inner: Arc<dyn Objective>,
    delay: Duration,
}

impl Objective for Delayed {
    fn value(&self, x: &[f64]) -> f64 {
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        self.inner.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner.gradient(x)
    }
}

pub fn with_delay(inner: Arc<dyn Objective>, delay: Duration) -> Arc<dyn Objective> {
    if delay.is_zero() {
        inner
    } else {
        Arc::new(Delayed { inner, delay })
    }
}

pub fn f1() -> BenchFunction {
    BenchFunction {
        name: "f1",
        objective: Arc::new(F1),
        domain: SearchDomain::cube(2, -2.0, 2.0).unwrap(),
        minimizers: vec![vec![0.0, 0.4]],
        min_value: 0.0,
        min_tolerance: 1e-9,
        default_generations: 6,
    }
}

pub fn easom() -> BenchFunction {
    BenchFunction {
        name: "easom",
        objective: Arc::new(Easom),
        domain: SearchDomain::cube(2, -100.0, 100.0).unwrap(),
        minimizers: vec![vec![PI, PI]],
        min_value: -1.0,
        min_tolerance: 1e-9,
        default_generations: 11,
    }
}

pub fn dejong_f2() -> BenchFunction {
    BenchFunction {
        name: "dejong-f2",
        objective: Arc::new(DejongF2),
        domain: SearchDomain::cube(2, -2.048, 2.048).unwrap(),
        minimizers: vec![vec![1.0, 1.0]],
        min_value: 0.0,
        min_tolerance: 1e-9,
        default_generations: 4,
    }
}

pub fn dejong_f2_literal() -> BenchFunction {
    BenchFunction {
        name: "dejong-f2-literal",
        objective: Arc::new(DejongF2Literal),
        // (1,1) -> 0 is a reference point, not a minimum: the form has no
        // minimum on any box interior in x2.
        domain: SearchDomain::cube(2, -2.048, 2.048).unwrap(),
        minimizers: vec![vec![1.0, 1.0]],
        min_value: 0.0,
        min_tolerance: 1e-9,
        default_generations: 4,
    }
}

pub fn dejong_f5() -> BenchFunction {
    BenchFunction {
        name: "dejong-f5",
        objective: Arc::new(DejongF5),
        domain: SearchDomain::cube(2, -65.536, 65.536).unwrap(),
        minimizers: vec![vec![-32.0, -32.0]],
        min_value: 0.998004,
        min_tolerance: 1e-4,
        default_generations: 10,
    }
}

pub fn registry() -> Vec<BenchFunction> {
    vec![f1(), easom(), dejong_f2(), dejong_f2_literal(), dejong_f5()]
}

pub fn by_name(name: &str) -> Result<BenchFunction> {
    registry()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| SlmError::UnknownFunction(name.to_string()))
}

/// Result of one baseline optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRun {
    pub algorithm: String,
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Best objective value seen up to and including each iteration.
    pub best_trace: Vec<f64>,
    pub evaluations: u64,
}

fn axis_samplers(domain: &SearchDomain) -> Vec<Uniform<f64>> {
    (0..domain.dim())
        .map(|i| Uniform::new_inclusive(domain.lower()[i], domain.upper()[i]))
        .collect()
}

fn sample_point(axes: &[Uniform<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    axes.iter().map(|u| u.sample(rng)).collect()
}

/// Uniform sampling; keeps the best of `budget` draws.
pub fn random_search(
    objective: &dyn Objective,
    domain: &SearchDomain,
    budget: u64,
    seed: u64,
    sense: Sense,
) -> Result<BaselineRun> {
    if budget == 0 {
        return Err(SlmError::Config("random search budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = axis_samplers(domain);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut trace = Vec::with_capacity(budget as usize);
    for _ in 0..budget {
        let x = sample_point(&axes, &mut rng);
        let f = objective.value(&x);
        let replace = match &best {
            None => true,
            Some((_, bf)) => sense.score(f) < sense.score(*bf),
        };
        if replace {
            best = Some((x, f));
        }
        trace.push(best.as_ref().unwrap().1);
    }
    let (best_point, best_value) = best.unwrap();
    Ok(BaselineRun {
        algorithm: "RS".into(),
        best_point,
        best_value,
        best_trace: trace,
        evaluations: budget,
    })
}

/// Random walk from `x_init`: Gaussian steps, improvements only, proposals
/// clamped to the box.
pub fn rsw(
    objective: &dyn Objective,
    domain: &SearchDomain,
    budget: u64,
    seed: u64,
    x_init: &[f64],
    step_scale: f64,
    sense: Sense,
) -> Result<BaselineRun> {
    if budget == 0 {
        return Err(SlmError::Config("random walk budget must be at least 1".into()));
    }
    if !domain.contains(x_init) {
        return Err(SlmError::Config(format!(
            "random walk initial point {x_init:?} lies outside the domain"
        )));
    }
    if !(step_scale.is_finite() && step_scale > 0.0) {
        return Err(SlmError::Config("step scale must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps: Vec<Normal<f64>> = (0..domain.dim())
        .map(|i| Normal::new(0.0, step_scale * domain.span(i)).unwrap())
        .collect();
    let mut current = x_init.to_vec();
    let mut f_cur = objective.value(&current);
    let mut trace = Vec::with_capacity(budget as usize);
    trace.push(f_cur);
    for _ in 1..budget {
        let prop: Vec<f64> = current
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                (c + steps[i].sample(&mut rng))
                    .clamp(domain.lower()[i], domain.upper()[i])
            })
            .collect();
        let f_prop = objective.value(&prop);
        if sense.score(f_prop) < sense.score(f_cur) {
            current = prop;
            f_cur = f_prop;
        }
        trace.push(f_cur);
    }
    Ok(BaselineRun {
        algorithm: "RSW".into(),
        best_point: current,
        best_value: f_cur,
        best_trace: trace,
        evaluations: budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaSchedule {
    /// Starting temperature; None estimates it from the value range of 100
    /// uniform samples (drawn from the same seeded stream).
    pub t0: Option<f64>,
    /// Geometric factor applied each iteration.
    pub cooling: f64,
    /// Gaussian proposal sigma as a fraction of each axis span.
    pub step_scale: f64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self { t0: None, cooling: 0.95, step_scale: 0.1 }
    }
}

/// Metropolis walk with geometric cooling; reports the best point seen.
pub fn simulated_annealing(
    objective: &dyn Objective,
    domain: &SearchDomain,
    budget: u64,
    seed: u64,
    schedule: SaSchedule,
    sense: Sense,
) -> Result<BaselineRun> {
    if budget == 0 {
        return Err(SlmError::Config("annealing budget must be at least 1".into()));
    }
    if !(schedule.cooling > 0.0 && schedule.cooling <= 1.0) {
        return Err(SlmError::Config("cooling factor must lie in (0, 1]".into()));
    }
    if !(schedule.step_scale.is_finite() && schedule.step_scale > 0.0) {
        return Err(SlmError::Config("step scale must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = axis_samplers(domain);
    let mut evaluations: u64 = 0;

    let t0 = match schedule.t0 {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(_) => return Err(SlmError::Config("starting temperature must be positive".into())),
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..100 {
                let f = sense.score(objective.value(&sample_point(&axes, &mut rng)));
                evaluations += 1;
                lo = lo.min(f);
                hi = hi.max(f);
            }
            let range = hi - lo;
            if range.is_finite() && range > 0.0 {
                range
            } else {
                1.0
            }
        }
    };

    let steps: Vec<Normal<f64>> = (0..domain.dim())
        .map(|i| Normal::new(0.0, schedule.step_scale * domain.span(i)).unwrap())
        .collect();
    let mut current = sample_point(&axes, &mut rng);
    let mut f_cur = objective.value(&current);
    evaluations += 1;
    let mut best_point = current.clone();
    let mut best_value = f_cur;
    let mut trace = Vec::with_capacity(budget as usize);
    trace.push(best_value);
    let mut temp = t0;
    for _ in 1..budget {
        let prop: Vec<f64> = current
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                (c + steps[i].sample(&mut rng))
                    .clamp(domain.lower()[i], domain.upper()[i])
            })
            .collect();
        let f_prop = objective.value(&prop);
        evaluations += 1;
        let delta = sense.score(f_prop) - sense.score(f_cur);
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
            current = prop;
            f_cur = f_prop;
        }
        if sense.score(f_cur) < sense.score(best_value) {
            best_point = current.clone();
            best_value = f_cur;
        }
        trace.push(best_value);
        temp *= schedule.cooling;
    }
    Ok(BaselineRun {
        algorithm: "SA".into(),
        best_point,
        best_value,
        best_trace: trace,
        evaluations,
    })
}
