//! Sibling cells share corners: subdividing the unit square yields 4 cells
//! with 16 corner slots but only 9 distinct points. The cluster tables
//! record who owns what, and the clustered backend uses a shared memo so
//! each distinct point costs one objective call no matter how many cells
//! touch it.

use std::collections::BTreeSet;

use slm::backend::master_round;
use slm::bench;
use slm::grid::{Cell, DyadicPoint};
use slm::labeling::{LabelContext, LabelingStrategy, Sense};
use slm::registry::{ClusterTables, EvalStore};
use slm::ExecutionBackend;

fn main() -> slm::Result<()> {
    let f = bench::f1();
    let siblings = Cell::initial(2).subdivide(52)?;

    let mut tables = ClusterTables::new(f.domain.clone());
    for c in &siblings {
        tables.register_cell(c);
    }
    println!(
        "{} cells, {} distinct points, {} shared by more than one cell",
        tables.cell_count(),
        tables.point_count(),
        tables.shared_point_count(),
    );
    println!();
    println!("point table (point -> owning cells):");
    tables.write_point_table(std::io::stdout())?;
    println!();
    println!("cell table (cell -> corner points):");
    tables.write_cell_table(std::io::stdout())?;

    let ctx = LabelContext {
        objective: f.objective.as_ref(),
        domain: &f.domain,
        sense: Sense::Min,
        strategy: LabelingStrategy::BestNeighbor,
        incumbent: None,
        fd_fallback: true,
        fd_step_rel: 1e-4,
    };

    let store = EvalStore::new(f.objective.clone(), f.domain.clone());
    let labeled = master_round(&siblings, &ctx, &ExecutionBackend::Clustered { workers: 2 }, &store)?;
    let slots: usize = labeled.iter().map(|l| l.outcomes.len()).sum();
    let distinct: BTreeSet<DyadicPoint> =
        labeled.iter().flat_map(|l| l.outcomes.iter().map(|o| o.point.clone())).collect();

    println!();
    println!("clustered labeling of one generation:");
    println!("  {} corner slots, {} distinct corners", slots, distinct.len());
    println!(
        "  store holds {} points after {} objective calls (no repeats)",
        store.len(),
        store.objective_calls(),
    );

    let scratch_store = EvalStore::new(f.objective.clone(), f.domain.clone());
    let labeled_p =
        master_round(&siblings, &ctx, &ExecutionBackend::Parallel { workers: 2 }, &scratch_store)?;
    let calls: u64 = labeled_p.iter().map(|l| l.objective_calls).sum();
    println!();
    println!("parallel labeling of the same generation:");
    println!(
        "  per-cell scratch memos made {calls} objective calls; shared store untouched ({} points)",
        scratch_store.len(),
    );
    Ok(())
}
