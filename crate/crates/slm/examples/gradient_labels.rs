//! Labels can come from the sign pattern of a descent direction instead of
//! best-neighbor sampling. With an analytic gradient the labeling needs no
//! extra objective calls at all; without one, a finite-difference fallback
//! probes 2n points per vertex. Both strategies contract the bowl to the
//! same region.

use slm::bench;
use slm::engine::{run, EngineConfig};
use slm::grid::format_coords;
use slm::labeling::LabelingStrategy;
use slm::ExecutionBackend;

fn main() -> slm::Result<()> {
    let f = bench::f1();

    let bn_cfg = EngineConfig { max_generations: 6, ..EngineConfig::default() };
    let bn = run(f.objective.clone(), f.domain.clone(), bn_cfg, ExecutionBackend::Serial)?;

    let grad_cfg = EngineConfig {
        strategy: LabelingStrategy::Gradient,
        max_generations: 6,
        ..EngineConfig::default()
    };
    let grad = run(f.objective.clone(), f.domain.clone(), grad_cfg, ExecutionBackend::Serial)?;

    println!("best-neighbor: best {} value {:.9}, {} objective calls",
        format_coords(&bn.best.coords), bn.best.value, bn.objective_calls);
    println!("gradient:      best {} value {:.9}, {} objective calls",
        format_coords(&grad.best.coords), grad.best.value, grad.objective_calls);

    // The needle has no analytic gradient in the registry, so the gradient
    // strategy silently switches to central differences per axis. On the
    // surrounding plateau those differences vanish, every label is 0, and
    // the run stalls far from the needle: sampling labels see more than
    // derivative labels on flat landscapes.
    let e = bench::easom();
    let fd_cfg = EngineConfig {
        strategy: LabelingStrategy::Gradient,
        max_generations: 11,
        ..EngineConfig::default()
    };
    let fd = run(e.objective.clone(), e.domain.clone(), fd_cfg, ExecutionBackend::Serial)?;
    println!();
    println!(
        "finite-difference fallback on the needle: best {} value {:.3e} (stalled on the plateau)",
        format_coords(&fd.best.coords),
        fd.best.value,
    );
    Ok(())
}
