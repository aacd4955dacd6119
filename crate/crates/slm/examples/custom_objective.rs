//! Bring your own objective: anything implementing the two-method trait
//! (value, optional gradient) runs through the same engine. Himmelblau's
//! polynomial has four global minima of equal depth; the grid contracts
//! into the one whose cell completes its labels, here the basin of
//! (-2.805, 3.131).

use std::sync::Arc;

use slm::engine::{run, EngineConfig};
use slm::grid::{format_coords, SearchDomain};
use slm::labeling::Objective;
use slm::ExecutionBackend;

struct Himmelblau;

impl Objective for Himmelblau {
    fn value(&self, x: &[f64]) -> f64 {
        let a = x[0] * x[0] + x[1] - 11.0;
        let b = x[0] + x[1] * x[1] - 7.0;
        a * a + b * b
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let a = x[0] * x[0] + x[1] - 11.0;
        let b = x[0] + x[1] * x[1] - 7.0;
        Some(vec![4.0 * x[0] * a + 2.0 * b, 2.0 * a + 4.0 * x[1] * b])
    }
}

fn main() -> slm::Result<()> {
    let domain = SearchDomain::new(vec![-6.0, -6.0], vec![6.0, 6.0])?;
    let cfg = EngineConfig { max_generations: 7, ..EngineConfig::default() };
    let report = run(Arc::new(Himmelblau), domain, cfg, ExecutionBackend::Serial)?;

    for t in &report.generations {
        println!("gen {}: step {:>8.5}, {} survivor(s)", t.generation, t.step, t.survivors.len());
    }

    println!();
    println!("final candidates (one per surviving cell):");
    for fp in &report.final_points {
        println!("  {} value {:.6}", format_coords(&fp.coords), fp.value);
    }
    println!();
    println!(
        "best {} value {:.9} using {} distinct grid points",
        format_coords(&report.best.coords),
        report.best.value,
        report.unique_points,
    );

    let minima = [(3.0, 2.0), (-2.805118, 3.131313), (-3.779310, -3.283186), (3.584428, -1.848127)];
    let b = &report.best.coords;
    let nearest = minima
        .iter()
        .map(|(mx, my)| ((b[0] - mx).hypot(b[1] - my), (mx, my)))
        .min_by(|a, c| a.0.total_cmp(&c.0))
        .unwrap();
    println!("nearest known minimizer ({}, {}), distance {:.4}", nearest.1 .0, nearest.1 .1, nearest.0);
    Ok(())
}
