//! Experiment harness: scenario generation, solver sweeps over the vCDN
//! count, CSV reporting, and summary tables.
//!
//! CSV schema, one row per (sweep point, solver):
//! `scenario,solver,vcdns,migration_cost,seq_time,par_time,replicas,vcache,vstream,runtime_ms,status`
//! In `both` mode a `gap` row follows each sweep point, carrying the
//! migration-cost gap percentage in the `migration_cost` column.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::hpac::{hpac_solve, HpacError, MigrationMode};
use crate::metrics::{self, cost_report, CostReport};
use crate::model::{gen_erdos_renyi_with, gen_three_tier_with, GenParams, Scenario};
use crate::opac::{check_feasibility, check_feasibility_with, solve_exact, CapacityView, Limits, SolveOutcome};
use crate::rat::Rat;

pub const CSV_HEADER: &str =
    "scenario,solver,vcdns,migration_cost,seq_time,par_time,replicas,vcache,vstream,runtime_ms,status";

/// Exit codes: 0 success, 2 infeasible, 3 budget exceeded, 64 usage error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Model(#[from] crate::model::ModelError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("{0}")]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error("{0}")]
    Hpac(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Opac,
    Hpac,
    Both,
}

#[derive(Debug, Clone)]
pub enum ScenarioSource {
    File(PathBuf),
    ThreeTier { n: usize, seed: u64, cap_range: (u32, u32) },
    ErdosRenyi { n: usize, m: usize, seed: u64, cap_range: (u32, u32) },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ScenarioSource,
    pub solver: SolverChoice,
    /// Sweep over the vCDN count, each value >= 1.
    pub sweep: Vec<usize>,
    pub budget_secs: u64,
    pub out: PathBuf,
    pub mode: MigrationMode,
    /// Write 0 for runtime_ms, making sweeps byte-reproducible.
    pub omit_runtime: bool,
}

/// Parses an inclusive sweep expression: `A..B` or a single count.
pub fn parse_sweep(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid sweep {text:?}; expected A..B or a count >= 1"));
    let values: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        vec![text.trim().parse().map_err(|_| bad())?]
    };
    if values.is_empty() || values.iter().any(|&v| v < 1) {
        return Err(bad());
    }
    Ok(values)
}

pub fn load_base_scenario(source: &ScenarioSource, n_vcdns: usize) -> Result<Scenario, CliError> {
    let params = GenParams { n_vcdns, ..GenParams::default() };
    match source {
        ScenarioSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(Scenario::parse(&text)?)
        }
        ScenarioSource::ThreeTier { n, seed, cap_range } => {
            let aggregate = n.div_ceil(2).max(1);
            let core = (n / 4).max(1);
            Ok(gen_three_tier_with(*n, aggregate, core, *seed, *cap_range, &params)?)
        }
        ScenarioSource::ErdosRenyi { n, m, seed, cap_range } => {
            Ok(gen_erdos_renyi_with(*n, *m, *seed, *cap_range, &params)?)
        }
    }
}

struct Row {
    scenario: String,
    solver: &'static str,
    vcdns: usize,
    report: Option<CostReport>,
    gap_percent: Option<Option<Rat>>,
    runtime_ms: u128,
    status: &'static str,
}

fn fmt_rat(r: Rat) -> String {
    let v = r.to_f64();
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

impl Row {
    fn to_csv(&self, omit_runtime: bool) -> String {
        let (mc, seq, par, replicas, vcache, vstream) = match (&self.report, &self.gap_percent) {
            (Some(r), _) => (
                fmt_rat(r.migration_cost),
                fmt_rat(r.migration_time_sequential),
                fmt_rat(r.migration_time_parallel),
                r.replica_number.to_string(),
                fmt_rat(r.vcache_cost),
                fmt_rat(r.vstream_cost),
            ),
            (None, Some(gap)) => (
                gap.map(fmt_rat).unwrap_or_default(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ),
            (None, None) => Default::default(),
        };
        let runtime = if omit_runtime { 0 } else { self.runtime_ms };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario, self.solver, self.vcdns, mc, seq, par, replicas, vcache, vstream,
            runtime, self.status
        )
    }
}

/// Runs the configured sweep, writes the CSV, and returns the exit code.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    if config.sweep.is_empty() {
        return Err(CliError::Usage("sweep must not be empty".into()));
    }
    if config.budget_secs == 0 {
        return Err(CliError::Usage("budget must be positive".into()));
    }
    let max_f = *config.sweep.iter().max().expect("nonempty sweep");
    let base = load_base_scenario(&config.source, max_f)?;
    if base.vcdns.len() < max_f {
        return Err(CliError::Usage(format!(
            "scenario has {} vcdns but the sweep asks for {max_f}",
            base.vcdns.len()
        )));
    }
    let label = scenario_label(&config.source);
    let limits = Limits {
        time_budget: std::time::Duration::from_secs(config.budget_secs),
        ..Limits::default()
    };

    let mut rows: Vec<Row> = Vec::new();
    let mut any_infeasible = false;
    let mut any_budget = false;
    for &k in &config.sweep {
        let scenario = base.restrict_vcdns(k);
        let mut opac_cost = None;
        let mut hpac_cost = None;
        if matches!(config.solver, SolverChoice::Opac | SolverChoice::Both) {
            let started = Instant::now();
            let outcome = solve_exact(&scenario, &limits);
            let runtime_ms = started.elapsed().as_millis();
            let (report, status) = match outcome {
                SolveOutcome::Solved(sol) => {
                    let audited = check_feasibility(&scenario, &sol)
                        .map(|r| r.is_feasible())
                        .unwrap_or(false);
                    if audited {
                        opac_cost = Some(sol.objective);
                        (Some(cost_report(&scenario, &sol)?), "ok")
                    } else {
                        (Some(cost_report(&scenario, &sol)?), "audit-failed")
                    }
                }
                SolveOutcome::Infeasible => {
                    any_infeasible = true;
                    (None, "infeasible")
                }
                SolveOutcome::BudgetExceeded { incumbent, .. } => {
                    any_budget = true;
                    match incumbent {
                        Some(sol) => (Some(cost_report(&scenario, &sol)?), "budget-exceeded"),
                        None => (None, "budget-exceeded"),
                    }
                }
            };
            rows.push(Row {
                scenario: label.clone(),
                solver: "opac",
                vcdns: k,
                report,
                gap_percent: None,
                runtime_ms,
                status,
            });
        }
        if matches!(config.solver, SolverChoice::Hpac | SolverChoice::Both) {
            let started = Instant::now();
            let outcome = hpac_solve(&scenario, config.mode);
            let runtime_ms = started.elapsed().as_millis();
            let (report, status) = match outcome {
                Ok(out) => {
                    let audited =
                        check_feasibility_with(&scenario, &out.solution, &CapacityView::Tree(&out.tree))
                            .map(|r| r.is_feasible())
                            .unwrap_or(false);
                    if audited {
                        hpac_cost = Some(out.solution.objective);
                        (Some(cost_report(&scenario, &out.solution)?), "ok")
                    } else {
                        (Some(cost_report(&scenario, &out.solution)?), "audit-failed")
                    }
                }
                Err(HpacError::Infeasible { .. }) => {
                    any_infeasible = true;
                    (None, "infeasible")
                }
                Err(e) => return Err(CliError::Hpac(e.to_string())),
            };
            rows.push(Row {
                scenario: label.clone(),
                solver: "hpac",
                vcdns: k,
                report,
                gap_percent: None,
                runtime_ms,
                status,
            });
        }
        if config.solver == SolverChoice::Both {
            if let (Some(h), Some(o)) = (hpac_cost, opac_cost) {
                let gap = metrics::gap(h, o);
                rows.push(Row {
                    scenario: label.clone(),
                    solver: "gap",
                    vcdns: k,
                    report: None,
                    gap_percent: Some(gap),
                    runtime_ms: 0,
                    status: if gap.is_some() { "ok" } else { "undefined" },
                });
            }
        }
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv(config.omit_runtime));
        csv.push('\n');
    }
    std::fs::write(&config.out, csv)
        .map_err(|source| CliError::Io { path: config.out.clone(), source })?;

    Ok(if any_infeasible {
        EXIT_INFEASIBLE
    } else if any_budget {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn scenario_label(source: &ScenarioSource) -> String {
    match source {
        ScenarioSource::File(path) => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into()),
        ScenarioSource::ThreeTier { n, seed, .. } => format!("three-tier-n{n}-s{seed}"),
        ScenarioSource::ErdosRenyi { n, m, seed, .. } => format!("er-n{n}-m{m}-s{seed}"),
    }
}

/// Renders per-vCDN-count mean/min/max summaries plus a gap table from a
/// CSV produced by [`run`].
pub fn report(path: &Path) -> Result<String, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Csv(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Csv(e.to_string()))?
        .clone();
    let expected: Vec<&str> = CSV_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Csv(format!("unexpected header {headers:?}")));
    }

    const METRICS: [(&str, usize); 7] = [
        ("migration_cost", 3),
        ("seq_time", 4),
        ("par_time", 5),
        ("replicas", 6),
        ("vcache", 7),
        ("vstream", 8),
        ("runtime_ms", 9),
    ];
    // (solver, vcdns) -> metric -> samples
    let mut groups: BTreeMap<(String, usize), BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    let mut gaps: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Csv(e.to_string()))?;
        if record.len() != expected.len() {
            return Err(CliError::Csv(format!("row has {} fields", record.len())));
        }
        let solver = record[1].to_string();
        let vcdns: usize = record[2]
            .parse()
            .map_err(|_| CliError::Csv(format!("bad vcdns field {:?}", &record[2])))?;
        if solver == "gap" {
            let text = if record[3].is_empty() { "undefined".into() } else { record[3].to_string() };
            gaps.entry(vcdns).or_default().push(text);
            continue;
        }
        if &record[10] != "ok" {
            continue;
        }
        let bucket = groups.entry((solver, vcdns)).or_default();
        for (name, idx) in METRICS {
            if let Ok(v) = record[idx].parse::<f64>() {
                bucket.entry(name).or_default().push(v);
            }
        }
    }

    let mut out = String::new();
    writeln!(out, "{:<8} {:>6} {:<16} {:>12} {:>12} {:>12}", "solver", "vcdns", "metric", "mean", "min", "max").unwrap();
    for ((solver, vcdns), bucket) in &groups {
        for (name, _) in METRICS {
            let Some(samples) = bucket.get(name) else { continue };
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
            let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            writeln!(
                out,
                "{solver:<8} {vcdns:>6} {name:<16} {mean:>12.4} {min:>12.4} {max:>12.4}"
            )
            .unwrap();
        }
    }
    if !gaps.is_empty() {
        writeln!(out, "\nvCDN number | Gap (%)").unwrap();
        for (vcdns, values) in &gaps {
            writeln!(out, "{vcdns:>11} | {}", values.join(", ")).unwrap();
        }
    }
    Ok(out)
}
