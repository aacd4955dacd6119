//! The Easom function is a sharp inverted needle at (pi, pi) on a flat
//! plateau covering almost all of [-100, 100]^2. Multimodal selection keeps
//! every completely labeled cell, so the needle's basin survives while the
//! grid refines through eleven generations.

use slm::bench;
use slm::engine::{run, EngineConfig};
use slm::grid::format_coords;
use slm::ExecutionBackend;

fn main() -> slm::Result<()> {
    let f = bench::easom();
    let cfg = EngineConfig { max_generations: 11, ..EngineConfig::default() };
    let report = run(f.objective.clone(), f.domain.clone(), cfg, ExecutionBackend::Serial)?;

    for t in &report.generations {
        println!(
            "gen {:>2}: step {:>9.5}, {} survivor(s), incumbent {} = {:.3e}",
            t.generation,
            t.step,
            t.survivors.len(),
            format_coords(&t.solution.coords),
            t.solution.value,
        );
    }

    let pi = std::f64::consts::PI;
    println!();
    println!(
        "best vertex {} value {:.12}",
        format_coords(&report.best.coords),
        report.best.value
    );
    println!(
        "coordinate error vs (pi, pi): ({:.7}, {:.7})",
        (report.best.coords[0] - pi).abs(),
        (report.best.coords[1] - pi).abs(),
    );
    Ok(())
}
