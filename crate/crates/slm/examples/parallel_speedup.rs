//! Speedup table with an artificial per-call delay standing in for an
//! expensive objective. Equivalent to:
//!
//!   slm bench --function f1 --generations 3 --delay-ms 5 \
//!             --backend parallel --sweep 1,2,4 --trials 1
//!
//! Columns: measured time, the T1/p lower bound, speedup T1/Tp, and
//! efficiency speedup/p, all truncated to 3 decimals so every derived cell
//! recomputes exactly from the printed times.

use slm::harness::{build_config, cmd_bench, write_bench_csv, CliOverrides};

fn main() -> slm::Result<()> {
    let cli = CliOverrides {
        function: Some("f1".into()),
        generations: Some(3),
        delay_ms: Some(5),
        trials: Some(1),
        sweep: Some("1,2,4".into()),
        backend: Some("parallel".into()),
        workers: Some(1),
        ..CliOverrides::default()
    };
    let cfg = build_config(&cli)?;

    eprintln!("measuring (three timed runs with a 5 ms delay per objective call)...");
    let (rows, warnings) = cmd_bench(&cfg)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_bench_csv(&rows, std::io::stdout())?;
    Ok(())
}
