use clap::{Args, Parser, Subcommand};
use slm::harness::{execute, CliOverrides, Command};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "slm",
    version,
    about = "Grid-labeling global optimizer: runs, baseline comparisons, worker sweeps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One search run; per-generation trace as CSV or a JSON report.
    Run(CommonArgs),
    /// Table comparing the search against RS, RSW, and SA baselines.
    Compare(CommonArgs),
    /// Worker-count sweep with speedup and efficiency columns.
    Bench(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Objective name: f1, easom, dejong-f2, dejong-f2-literal, dejong-f5.
    #[arg(long)]
    function: Option<String>,
    /// Box override, "lo,hi" per axis separated by ';': "-2,2;-2,2".
    #[arg(long)]
    domain: Option<String>,
    /// Label-select-subdivide passes to run.
    #[arg(long)]
    generations: Option<u32>,
    /// Stop once cells are at or below this step size.
    #[arg(long = "h-tol")]
    h_tol: Option<f64>,
    /// best-neighbor or gradient.
    #[arg(long)]
    strategy: Option<String>,
    /// serial, parallel, or clustered.
    #[arg(long)]
    backend: Option<String>,
    /// Worker count (default: SLM_WORKERS, then the hardware).
    #[arg(long)]
    workers: Option<usize>,
    /// Worker counts for bench: "1..10" or "1,2,4".
    #[arg(long)]
    sweep: Option<String>,
    /// Timed runs per sweep point.
    #[arg(long)]
    trials: Option<u32>,
    /// Artificial delay per objective evaluation.
    #[arg(long = "delay-ms")]
    delay_ms: Option<u64>,
    /// Random seed for the baselines.
    #[arg(long)]
    seed: Option<u64>,
    /// Keep all completely labeled cells (true) or one (false).
    #[arg(long)]
    multimodal: Option<bool>,
    /// min or max.
    #[arg(long)]
    sense: Option<String>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random-search iteration budget.
    #[arg(long = "rs-budget")]
    rs_budget: Option<u64>,
    /// Random-walk iteration budget.
    #[arg(long = "rsw-budget")]
    rsw_budget: Option<u64>,
    /// Annealing iteration budget.
    #[arg(long = "sa-budget")]
    sa_budget: Option<u64>,
    /// Random-walk start point, "x1,x2".
    #[arg(long = "rsw-initial")]
    rsw_initial: Option<String>,
}

impl CommonArgs {
    fn into_overrides(self) -> CliOverrides {
        CliOverrides {
            function: self.function,
            domain: self.domain,
            generations: self.generations,
            h_tol: self.h_tol,
            strategy: self.strategy,
            backend: self.backend,
            workers: self.workers,
            sweep: self.sweep,
            trials: self.trials,
            delay_ms: self.delay_ms,
            seed: self.seed,
            multimodal: self.multimodal,
            sense: self.sense,
            output: self.output,
            format: self.format,
            config: self.config,
            rs_budget: self.rs_budget,
            rsw_budget: self.rsw_budget,
            sa_budget: self.sa_budget,
            rsw_initial: self.rsw_initial,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let (cmd, args) = match cli.cmd {
        Cmd::Run(a) => (Command::Run, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::Bench(a) => (Command::Bench, a),
    };
    match execute(cmd, &args.into_overrides()) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
