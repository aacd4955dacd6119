//! Shekel's foxholes: 25 narrow wells on a 5x5 lattice, deepest at
//! (-32, -32), surrounded by a plateau near 500. A run here shows the
//! fallback path: one generation finds no completely labeled cell, keeps
//! the cell holding the best corner, and the next generation recovers.

use slm::bench;
use slm::engine::{run, EngineConfig};
use slm::grid::{format_coords, Label};
use slm::ExecutionBackend;

fn main() -> slm::Result<()> {
    let f = bench::dejong_f5();

    for (x, what) in [
        ([-32.0, -32.0], "deepest well"),
        ([-16.0, -32.0], "second well"),
        ([32.0, 32.0], "shallowest corner well"),
        ([0.0, 50.0], "plateau"),
    ] {
        println!("f{} = {:>12.6}  ({what})", format_coords(&x), f.objective.value(&x));
    }

    let cfg = EngineConfig { max_generations: 5, ..EngineConfig::default() };
    let report = run(f.objective.clone(), f.domain.clone(), cfg, ExecutionBackend::Serial)?;

    println!();
    for t in &report.generations {
        println!(
            "gen {}: step {:>7.3}, {} cell(s), {}",
            t.generation,
            t.step,
            t.survivors.len(),
            if t.fallback { "fallback to best corner" } else { "complete cells kept" },
        );
    }

    // Each surviving cell's labels certify the find: a corner labeled 0
    // whose proposed move is itself cannot improve on the half-step grid.
    let last = report.generations.last().unwrap();
    println!();
    for cell in &last.survivors {
        let corners = cell.vertices();
        let fixed = last
            .records
            .iter()
            .find(|r| corners.contains(&r.point) && r.label == Label(0));
        if let Some(r) = fixed {
            println!(
                "cell {:?}@{}: corner {} = {:.6} is a grid-local minimum",
                cell.anchor(),
                cell.level(),
                format_coords(&r.coords),
                r.value,
            );
        }
    }
    println!();
    println!("best {} value {:.6}", format_coords(&report.best.coords), report.best.value);
    Ok(())
}
