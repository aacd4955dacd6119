//! Head-to-head table on the reference bowl: subdivision search against
//! random search, an improvement-only random walk, and simulated
//! annealing. Equivalent to:
//!
//!   slm compare --function f1 --seed 42
//!
//! The error column is the componentwise distance from each algorithm's
//! answer to the nearest known minimizer. Rerunning with the same seed
//! reproduces every digit; only the baselines consume randomness.

use slm::harness::{build_config, cmd_compare, write_compare_csv, CliOverrides};

fn main() -> slm::Result<()> {
    let cli = CliOverrides {
        function: Some("f1".into()),
        seed: Some(42),
        workers: Some(1),
        ..CliOverrides::default()
    };
    let cfg = build_config(&cli)?;
    let rows = cmd_compare(&cfg)?;
    write_compare_csv(&rows, std::io::stdout())?;

    println!();
    for r in &rows {
        println!(
            "{:<4} best value {:.9} in {} iterations",
            r.algorithm, r.best_value, r.iterations
        );
    }
    Ok(())
}
