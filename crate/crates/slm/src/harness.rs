use serde::Serialize;
use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::backend::ExecutionBackend;
use crate::bench::{
    by_name, random_search, rsw, simulated_annealing, with_delay, BenchFunction, SaSchedule,
};
use crate::engine::{self, EngineConfig, RunReport};
use crate::error::{Result, SlmError};
use crate::grid::{format_coords, SearchDomain};
use crate::labeling::{LabelingStrategy, Sense};

pub const SCHEMA_VERSION: u32 = 1;

/// Keep three decimal places by truncation, not rounding: 0.7166 -> 0.716.
/// The small nudge keeps values that are exactly k/1000 (up to float
/// representation) from falling into the bucket below.
pub fn truncate3(x: f64) -> f64 {
    (x * 1000.0 + 1e-6).trunc() / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BackendKind {
    Serial,
    Parallel,
    Clustered,
}

impl BackendKind {
    pub fn to_backend(self, workers: usize) -> ExecutionBackend {
        match self {
            BackendKind::Serial => ExecutionBackend::Serial,
            BackendKind::Parallel => ExecutionBackend::Parallel { workers },
            BackendKind::Clustered => ExecutionBackend::Clustered { workers },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Serial => "serial",
            BackendKind::Parallel => "parallel",
            BackendKind::Clustered => "clustered",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serial" => Ok(BackendKind::Serial),
            "parallel" => Ok(BackendKind::Parallel),
            "clustered" => Ok(BackendKind::Clustered),
            other => Err(SlmError::Config(format!(
                "backend must be serial, parallel, or clustered, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(SlmError::Config(format!("format must be csv or json, got {other:?}"))),
        }
    }
}

/// "lo,hi;lo,hi;..." with one lo,hi pair per axis.
pub fn parse_domain(s: &str) -> Result<SearchDomain> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (i, axis) in s.split(';').enumerate() {
        let Some((lo, hi)) = axis.split_once(',') else {
            return Err(SlmError::Config(format!(
                "axis {i}: expected lo,hi in domain spec {s:?}"
            )));
        };
        lower.push(parse_f64(lo.trim(), "domain bound")?);
        upper.push(parse_f64(hi.trim(), "domain bound")?);
    }
    SearchDomain::new(lower, upper)
}

/// "a..b" (inclusive) or a comma-separated list of worker counts.
pub fn parse_sweep(s: &str) -> Result<Vec<usize>> {
    let values: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = parse_usize(a.trim(), "sweep bound")?;
        let b: usize = parse_usize(b.trim(), "sweep bound")?;
        if a > b {
            return Err(SlmError::Config(format!("empty sweep range {s:?}")));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|v| parse_usize(v.trim(), "sweep value"))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(SlmError::Config("sweep must name at least one worker count".into()));
    }
    if values.iter().any(|&v| v == 0) {
        return Err(SlmError::Config("sweep values must be at least 1".into()));
    }
    Ok(values)
}

/// Comma-separated coordinates: "14.0356,14.0356".
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_f64(v.trim(), "coordinate")).collect()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| SlmError::Config(format!("bad {what} {s:?}")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| SlmError::Config(format!("bad {what} {s:?}")))
}

/// Raw option values as they arrive from the command line; None means the
/// flag was absent and the config file or default applies.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub function: Option<String>,
    pub domain: Option<String>,
    pub generations: Option<u32>,
    pub h_tol: Option<f64>,
    pub strategy: Option<String>,
    pub backend: Option<String>,
    pub workers: Option<usize>,
    pub sweep: Option<String>,
    pub trials: Option<u32>,
    pub delay_ms: Option<u64>,
    pub seed: Option<u64>,
    pub multimodal: Option<bool>,
    pub sense: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub config: Option<PathBuf>,
    pub rs_budget: Option<u64>,
    pub rsw_budget: Option<u64>,
    pub sa_budget: Option<u64>,
    pub rsw_initial: Option<String>,
}

/// Fully resolved experiment settings: flags override config-file entries,
/// which override defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub function: String,
    /// None means the function's canonical box.
    pub domain: Option<SearchDomain>,
    /// None means the function's reference generation count.
    pub generations: Option<u32>,
    pub h_tol: Option<f64>,
    pub strategy: LabelingStrategy,
    pub backend: BackendKind,
    pub workers: usize,
    pub sweep: Option<Vec<usize>>,
    pub trials: u32,
    pub delay_ms: u64,
    pub seed: u64,
    pub multimodal: bool,
    pub sense: Sense,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub rs_budget: u64,
    pub rsw_budget: u64,
    pub sa_budget: u64,
    pub rsw_initial: Option<Vec<f64>>,
}

const CONFIG_KEYS: &[&str] = &[
    "function",
    "domain",
    "generations",
    "h-tol",
    "strategy",
    "backend",
    "workers",
    "sweep",
    "trials",
    "delay-ms",
    "seed",
    "multimodal",
    "sense",
    "output",
    "format",
    "rs-budget",
    "rsw-budget",
    "sa-budget",
    "rsw-initial",
];

/// key=value per line; blank lines and # comments ignored. Keys spell the
/// same as the long flags.
pub fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(SlmError::Config(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(SlmError::Config(format!(
                "{}:{}: unknown key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn build_config(cli: &CliOverrides) -> Result<ExperimentConfig> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    // Flag wins, then file, then default.
    fn pick<T, F>(flag: &Option<T>, file: Option<&String>, parse: F) -> Result<Option<T>>
    where
        T: Clone,
        F: Fn(&str) -> Result<T>,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        file.map(|s| parse(s)).transpose()
    }

    let function = pick(&cli.function, file.get("function"), |s| Ok(s.to_string()))?
        .unwrap_or_else(|| "f1".to_string());
    let domain = pick(&cli.domain, file.get("domain"), |s| Ok(s.to_string()))?
        .map(|s| parse_domain(&s))
        .transpose()?;
    let generations = pick(&cli.generations, file.get("generations"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad generations {s:?}")))
    })?;
    let h_tol = pick(&cli.h_tol, file.get("h-tol"), |s| parse_f64(s, "h tolerance"))?;
    let strategy = pick(&cli.strategy, file.get("strategy"), |s| Ok(s.to_string()))?
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(LabelingStrategy::BestNeighbor);
    let backend = pick(&cli.backend, file.get("backend"), |s| Ok(s.to_string()))?
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(BackendKind::Serial);
    let workers = match pick(&cli.workers, file.get("workers"), |s| parse_usize(s, "workers"))? {
        Some(w) => w,
        None => match std::env::var("SLM_WORKERS") {
            Ok(v) => parse_usize(v.trim(), "SLM_WORKERS")?,
            Err(_) => default_parallelism(),
        },
    };
    let sweep = pick(&cli.sweep, file.get("sweep"), |s| Ok(s.to_string()))?
        .map(|s| parse_sweep(&s))
        .transpose()?;
    let trials = pick(&cli.trials, file.get("trials"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad trials {s:?}")))
    })?
    .unwrap_or(30);
    let delay_ms = pick(&cli.delay_ms, file.get("delay-ms"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad delay-ms {s:?}")))
    })?
    .unwrap_or(0);
    let seed = pick(&cli.seed, file.get("seed"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad seed {s:?}")))
    })?
    .unwrap_or(0);
    let multimodal = pick(&cli.multimodal, file.get("multimodal"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad multimodal {s:?} (true/false)")))
    })?
    .unwrap_or(true);
    let sense = pick(&cli.sense, file.get("sense"), |s| Ok(s.to_string()))?
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(Sense::Min);
    let output = pick(&cli.output, file.get("output"), |s| Ok(PathBuf::from(s)))?;
    let format = pick(&cli.format, file.get("format"), |s| Ok(s.to_string()))?
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(OutputFormat::Csv);
    let rs_budget = pick(&cli.rs_budget, file.get("rs-budget"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad rs-budget {s:?}")))
    })?
    .unwrap_or(1000);
    let rsw_budget = pick(&cli.rsw_budget, file.get("rsw-budget"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad rsw-budget {s:?}")))
    })?
    .unwrap_or(500);
    let sa_budget = pick(&cli.sa_budget, file.get("sa-budget"), |s| {
        s.parse().map_err(|_| SlmError::Config(format!("bad sa-budget {s:?}")))
    })?
    .unwrap_or(150);
    let rsw_initial = pick(&cli.rsw_initial, file.get("rsw-initial"), |s| Ok(s.to_string()))?
        .map(|s| parse_point(&s))
        .transpose()?;

    if trials == 0 {
        return Err(SlmError::Config("trials must be at least 1".into()));
    }
    if workers == 0 {
        return Err(SlmError::Config("workers must be at least 1".into()));
    }
    if rs_budget == 0 || rsw_budget == 0 || sa_budget == 0 {
        return Err(SlmError::Config("baseline budgets must be at least 1".into()));
    }

    Ok(ExperimentConfig {
        function,
        domain,
        generations,
        h_tol,
        strategy,
        backend,
        workers,
        sweep,
        trials,
        delay_ms,
        seed,
        multimodal,
        sense,
        output,
        format,
        rs_budget,
        rsw_budget,
        sa_budget,
        rsw_initial,
    })
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn resolve_function(cfg: &ExperimentConfig) -> Result<(BenchFunction, SearchDomain, u32)> {
    let func = by_name(&cfg.function)?;
    func.validate()?;
    let domain = cfg.domain.clone().unwrap_or_else(|| func.domain.clone());
    let generations = cfg.generations.unwrap_or(func.default_generations);
    Ok((func, domain, generations))
}

fn engine_config(cfg: &ExperimentConfig, generations: u32) -> EngineConfig {
    EngineConfig {
        strategy: cfg.strategy,
        sense: cfg.sense,
        h_tolerance: cfg.h_tol,
        max_generations: generations,
        multimodal: cfg.multimodal,
        ..EngineConfig::default()
    }
}

/// One engine run with the configured function, domain, and backend.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let (func, domain, generations) = resolve_function(cfg)?;
    let objective = with_delay(func.objective.clone(), Duration::from_millis(cfg.delay_ms));
    let backend = cfg.backend.to_backend(cfg.workers);
    engine::run(objective, domain, engine_config(cfg, generations), backend)
}

/// Subdivision search next to the three sampling baselines on one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub iterations: u64,
    pub optimal_point: Vec<f64>,
    pub best_point: Vec<f64>,
    /// Componentwise |found - optimal|.
    pub error: Vec<f64>,
    pub best_value: f64,
}

fn comparison_row(
    algorithm: &str,
    iterations: u64,
    func: &BenchFunction,
    best_point: Vec<f64>,
    best_value: f64,
) -> ComparisonRow {
    let optimal = func
        .minimizers
        .iter()
        .min_by(|a, b| {
            let da: f64 = a.iter().zip(&best_point).map(|(x, y)| (x - y) * (x - y)).sum();
            let db: f64 = b.iter().zip(&best_point).map(|(x, y)| (x - y) * (x - y)).sum();
            da.total_cmp(&db)
        })
        .expect("every bench function states a minimizer")
        .clone();
    let error = best_point.iter().zip(&optimal).map(|(x, o)| (x - o).abs()).collect();
    ComparisonRow {
        algorithm: algorithm.to_string(),
        iterations,
        optimal_point: optimal,
        best_point,
        error,
        best_value,
    }
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<Vec<ComparisonRow>> {
    let (func, domain, generations) = resolve_function(cfg)?;
    let objective = with_delay(func.objective.clone(), Duration::from_millis(cfg.delay_ms));
    let backend = cfg.backend.to_backend(cfg.workers);
    let report = engine::run(objective, domain.clone(), engine_config(cfg, generations), backend)?;
    let mut rows = vec![comparison_row(
        "SLM",
        u64::from(report.generations.len() as u32),
        &func,
        report.best.coords.clone(),
        report.best.value,
    )];

    let obj = func.objective.as_ref();
    let rs = random_search(obj, &domain, cfg.rs_budget, cfg.seed, cfg.sense)?;
    rows.push(comparison_row("RS", cfg.rs_budget, &func, rs.best_point, rs.best_value));

    let x_init = match &cfg.rsw_initial {
        Some(p) => p.clone(),
        None => (0..domain.dim())
            .map(|i| domain.lower()[i] + 0.75 * domain.span(i))
            .collect(),
    };
    let walk = rsw(
        obj,
        &domain,
        cfg.rsw_budget,
        cfg.seed.wrapping_add(1),
        &x_init,
        0.1,
        cfg.sense,
    )?;
    rows.push(comparison_row("RSW", cfg.rsw_budget, &func, walk.best_point, walk.best_value));

    let sa = simulated_annealing(
        obj,
        &domain,
        cfg.sa_budget,
        cfg.seed.wrapping_add(2),
        SaSchedule::default(),
        cfg.sense,
    )?;
    rows.push(comparison_row("SA", cfg.sa_budget, &func, sa.best_point, sa.best_value));
    Ok(rows)
}

/// One row of the worker-sweep table. All four numeric columns carry
/// 3-decimal truncated values so each derived cell can be recomputed from
/// the printed Time cells alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub algorithm: String,
    pub np: usize,
    pub time: f64,
    pub lb_time: f64,
    pub speedup: f64,
    pub efficiency: f64,
}

impl SpeedupRow {
    pub fn derive(algorithm: &str, np: usize, t1_mean: f64, tp_mean: f64) -> Self {
        let t1 = truncate3(t1_mean);
        let tp = truncate3(tp_mean);
        SpeedupRow {
            algorithm: algorithm.to_string(),
            np,
            time: tp,
            lb_time: truncate3(t1 / np as f64),
            speedup: truncate3(t1 / tp),
            efficiency: truncate3(t1 / tp / np as f64),
        }
    }
}

pub fn cmd_bench(cfg: &ExperimentConfig) -> Result<(Vec<SpeedupRow>, Vec<String>)> {
    let (func, domain, generations) = resolve_function(cfg)?;
    let objective = with_delay(func.objective.clone(), Duration::from_millis(cfg.delay_ms));
    let engine_cfg = engine_config(cfg, generations);
    let mut warnings = Vec::new();

    let mean_time = |backend: ExecutionBackend| -> Result<f64> {
        let mut total = 0.0;
        for _ in 0..cfg.trials {
            let report =
                engine::run(objective.clone(), domain.clone(), engine_cfg.clone(), backend)?;
            total += report.wall_time_s;
        }
        Ok(total / f64::from(cfg.trials))
    };

    const FAST_ROW: &str = "mean time under 1 ms truncates to 0.000 and the ratio columns \
                            degenerate; raise --delay-ms or --generations for a meaningful table";

    if cfg.backend == BackendKind::Serial {
        // Serial timing does not depend on a worker count; one reference row.
        let t = mean_time(ExecutionBackend::Serial)?;
        if truncate3(t) == 0.0 {
            warnings.push(FAST_ROW.to_string());
        }
        return Ok((vec![SpeedupRow::derive("serial", 1, t, t)], warnings));
    }

    let mut nps = cfg.sweep.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
    if !nps.contains(&1) {
        // T1 anchors every derived column.
        nps.push(1);
    }
    nps.sort_unstable();
    nps.dedup();

    let avail = default_parallelism();
    let mut times = Vec::with_capacity(nps.len());
    for &np in &nps {
        if np > avail {
            warnings.push(format!(
                "NP {np} exceeds available parallelism {avail}; row measured anyway"
            ));
        }
        let t = mean_time(cfg.backend.to_backend(np))?;
        if truncate3(t) == 0.0 && !warnings.iter().any(|w| w == FAST_ROW) {
            warnings.push(FAST_ROW.to_string());
        }
        times.push((np, t));
    }
    let t1 = times[0].1;
    let rows = times
        .iter()
        .map(|&(np, tp)| SpeedupRow::derive(cfg.backend.name(), np, t1, tp))
        .collect();
    Ok((rows, warnings))
}

pub fn write_run_csv<W: Write>(report: &RunReport, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["Generation", "Point", "Mutated point", "Label", "Solution"])?;
    for t in &report.generations {
        let solution = format_coords(&t.solution.coords);
        for r in &t.records {
            wtr.write_record([
                t.generation.to_string(),
                format_coords(&r.coords),
                r.mutated_coords.as_deref().map(format_coords).unwrap_or_default(),
                r.label.to_string(),
                solution.clone(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_compare_csv<W: Write>(rows: &[ComparisonRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["Algorithm", "Iteration", "Optimal point", "Best Point", "Error"])?;
    for r in rows {
        wtr.write_record([
            r.algorithm.clone(),
            r.iterations.to_string(),
            format_coords(&r.optimal_point),
            format_coords(&r.best_point),
            format_coords(&r.error),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_bench_csv<W: Write>(rows: &[SpeedupRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["Algorithm", "NP", "Time", "LB Time", "Speedup", "Efficiency"])?;
    for r in rows {
        wtr.write_record([
            r.algorithm.clone(),
            r.np.to_string(),
            format!("{:.3}", r.time),
            format!("{:.3}", r.lb_time),
            format!("{:.3}", r.speedup),
            format!("{:.3}", r.efficiency),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a RunReport,
}

#[derive(Serialize)]
struct RowsEnvelope<'a, T: Serialize> {
    schema_version: u32,
    rows: &'a [T],
}

pub fn write_run_json<W: Write>(report: &RunReport, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &ReportEnvelope { schema_version: SCHEMA_VERSION, report })?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows_json<W: Write, T: Serialize>(rows: &[T], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &RowsEnvelope { schema_version: SCHEMA_VERSION, rows })?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Compare,
    Bench,
}

/// Full CLI flow for one subcommand: resolve config, run, emit to the
/// configured output. Returns warnings for the caller's stderr.
pub fn execute(cmd: Command, cli: &CliOverrides) -> Result<Vec<String>> {
    let cfg = build_config(cli)?;
    let mut out: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    let mut warnings = Vec::new();
    match cmd {
        Command::Run => {
            let report = cmd_run(&cfg)?;
            match cfg.format {
                OutputFormat::Csv => write_run_csv(&report, &mut out)?,
                OutputFormat::Json => write_run_json(&report, &mut out)?,
            }
        }
        Command::Compare => {
            let rows = cmd_compare(&cfg)?;
            match cfg.format {
                OutputFormat::Csv => write_compare_csv(&rows, &mut out)?,
                OutputFormat::Json => write_rows_json(&rows, &mut out)?,
            }
        }
        Command::Bench => {
            let (rows, warns) = cmd_bench(&cfg)?;
            warnings = warns;
            match cfg.format {
                OutputFormat::Csv => write_bench_csv(&rows, &mut out)?,
                OutputFormat::Json => write_rows_json(&rows, &mut out)?,
            }
        }
    }
    out.flush()?;
    Ok(warnings)
}
