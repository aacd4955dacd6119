//! Serial run on the reference bowl x1^2 + (x2 - 0.4)^2 over [-2, 2]^2,
//! printing the per-generation contraction toward (0, 0.4).

use slm::bench;
use slm::engine::{run, EngineConfig};
use slm::grid::format_coords;
use slm::ExecutionBackend;

fn main() -> slm::Result<()> {
    let f = bench::f1();
    let cfg = EngineConfig { max_generations: 6, ..EngineConfig::default() };
    let report = run(f.objective.clone(), f.domain.clone(), cfg, ExecutionBackend::Serial)?;

    println!("{:>3}  {:>8}  {:>5}  {:>8}  {:<22}  {}", "gen", "step", "cells", "fallback", "solution", "value");
    for t in &report.generations {
        println!(
            "{:>3}  {:>8}  {:>5}  {:>8}  {:<22}  {:.9}",
            t.generation,
            t.step,
            t.cells,
            if t.fallback { "yes" } else { "" },
            format_coords(&t.solution.coords),
            t.solution.value,
        );
    }

    println!();
    println!("frontier: {} cells at step {}", report.final_cells.len(), report.final_step);
    println!(
        "best vertex {} value {:.9} after {} distinct points ({} objective calls)",
        format_coords(&report.best.coords),
        report.best.value,
        report.unique_points,
        report.objective_calls,
    );
    Ok(())
}
