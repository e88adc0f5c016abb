//! Experiment sweeps: generate, solve with each requested solver, validate,
//! record; then summarize and chart.

mod chart;
mod stats;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{build_milp, solve_with_incumbent, SolveLimits, SolveStatus};
use crate::heuristic::{self, Strategy};
use crate::model::{validate, CostBreakdown, Violation};
use crate::scenario::{generate, GenerateError, GeneratorParams};

pub use chart::{emit_chart, ChartKind};
pub use stats::{median, slope, Stats, Z95};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    TimeSlots,
    Locations,
}

impl Axis {
    pub fn apply(self, params: &mut GeneratorParams, value: usize) {
        match self {
            Axis::TimeSlots => params.horizon = value,
            Axis::Locations => params.n_locations = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    Heu1,
    Heu2,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Heu1 => "heu1",
            SolverKind::Heu2 => "heu2",
        }
    }
}

fn default_budget() -> f64 {
    60.0
}

fn default_rho() -> f64 {
    Strategy::DEFAULT_RHO
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub axis: Axis,
    pub values: Vec<usize>,
    /// Generator settings shared by every instance; the axis field and the
    /// seed are overwritten per instance.
    #[serde(default)]
    pub params: GeneratorParams,
    pub seeds: Vec<u64>,
    pub solvers: Vec<SolverKind>,
    /// Per-instance budget of the exact solver, seconds.
    #[serde(default = "default_budget")]
    pub time_budget_secs: f64,
    #[serde(default = "default_rho")]
    pub heu2_rho: f64,
    /// Seed the exact solver with the HEU1 solution.
    #[serde(default = "default_true")]
    pub warm_start: bool,
    /// When false, wall times are left out of the CSV so that reruns are
    /// byte-identical.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{solver} produced an infeasible solution at {axis:?}={value}, seed {seed}: {violations:?}")]
    ContractBreach {
        solver: &'static str,
        axis: Axis,
        value: usize,
        seed: u64,
        violations: Vec<Violation>,
    },
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.into()));
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.values.is_empty() || self.values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("axis values must be non-empty and strictly increasing");
        }
        if self.solvers.is_empty() {
            return bad("no solver requested");
        }
        if !(self.time_budget_secs > 0.0 && self.time_budget_secs.is_finite()) {
            return bad("time budget must be positive");
        }
        if !(self.heu2_rho > 0.0 && self.heu2_rho <= 1.0) {
            return bad("heu2_rho must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Greedy output; no optimality claim.
    Heuristic,
    Exact(SolveStatus),
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Heuristic => "heuristic",
            RunStatus::Exact(s) => s.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub axis_value: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub status: RunStatus,
    pub cost: CostBreakdown,
    pub wall_time: Duration,
    /// Total cost over the exact optimum, when the exact run proved one.
    pub cost_ratio: Option<f64>,
}

/// Runs the sweep in (axis value, seed, solver) order.
///
/// The exact solver is timed on its own; a warm start from HEU1 is fed in
/// when configured, but the heuristic's time is not charged to it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentResult>, ExperimentError> {
    config.validate()?;
    let mut solvers = config.solvers.clone();
    solvers.sort_unstable();
    solvers.dedup();
    let mut out = Vec::new();
    for &value in &config.values {
        for &seed in &config.seeds {
            let mut params = config.params.clone();
            config.axis.apply(&mut params, value);
            params.seed = seed;
            let scenario = generate(&params)?;
            let mut rows: Vec<ExperimentResult> = Vec::new();
            let mut exact_total = None;
            for &solver in &solvers {
                let started = Instant::now();
                let (status, solution, cost) = match solver {
                    SolverKind::Exact => {
                        let start = config
                            .warm_start
                            .then(|| heuristic::solve(&scenario, &Strategy::Heu1).expect("heu1 needs no parameters"));
                        let started_exact = Instant::now();
                        let model = build_milp(&scenario);
                        let limits = SolveLimits {
                            time_budget: Duration::from_secs_f64(config.time_budget_secs),
                            node_budget: u64::MAX,
                        };
                        let report = solve_with_incumbent(&model, &limits, start.as_ref().map(|s| &s.solution));
                        let elapsed = started_exact.elapsed();
                        // No incumbent at all: nothing to record.
                        let Some(solution) = report.solution else {
                            continue;
                        };
                        let cost = crate::model::evaluate_cost(&scenario, &solution).expect("dimensions match");
                        if report.status == SolveStatus::Optimal {
                            exact_total = Some(cost.total);
                        }
                        rows.push(ExperimentResult {
                            axis_value: value,
                            seed,
                            solver,
                            status: RunStatus::Exact(report.status),
                            cost,
                            wall_time: elapsed,
                            cost_ratio: None,
                        });
                        check(&scenario, &solution, solver, config.axis, value, seed)?;
                        continue;
                    }
                    SolverKind::Heu1 => {
                        let o = heuristic::solve(&scenario, &Strategy::Heu1).expect("heu1 needs no parameters");
                        (RunStatus::Heuristic, o.solution, o.cost)
                    }
                    SolverKind::Heu2 => {
                        let o = heuristic::solve(&scenario, &Strategy::Heu2 { rho: config.heu2_rho })
                            .map_err(|e| ExperimentError::Config(e.to_string()))?;
                        (RunStatus::Heuristic, o.solution, o.cost)
                    }
                };
                let elapsed = started.elapsed();
                check(&scenario, &solution, solver, config.axis, value, seed)?;
                rows.push(ExperimentResult {
                    axis_value: value,
                    seed,
                    solver,
                    status,
                    cost,
                    wall_time: elapsed,
                    cost_ratio: None,
                });
            }
            if let Some(opt) = exact_total {
                for r in &mut rows {
                    r.cost_ratio = Some(if opt.0 == 0 {
                        if r.cost.total.0 == 0 { 1.0 } else { f64::INFINITY }
                    } else {
                        r.cost.total.0 as f64 / opt.0 as f64
                    });
                }
            }
            out.extend(rows);
        }
    }
    Ok(out)
}

fn check(
    scenario: &crate::model::Scenario,
    solution: &crate::model::Solution,
    solver: SolverKind,
    axis: Axis,
    value: usize,
    seed: u64,
) -> Result<(), ExperimentError> {
    let violations = validate(scenario, solution).expect("dimensions match");
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ExperimentError::ContractBreach {
            solver: solver.name(),
            axis,
            value,
            seed,
            violations,
        })
    }
}

pub const RESULTS_HEADER: [&str; 12] = [
    "axis",
    "seed",
    "solver",
    "status",
    "fixed",
    "operational",
    "penalty",
    "migration",
    "hardware",
    "total",
    "wall_ms",
    "cost_ratio",
];

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// `results.csv`. Money columns are in currency units with three decimals.
pub fn results_csv(results: &[ExperimentResult], record_wall_time: bool) -> Vec<u8> {
    csv_bytes(
        &RESULTS_HEADER,
        results.iter().map(|r| {
            let c = &r.cost;
            vec![
                r.axis_value.to_string(),
                r.seed.to_string(),
                r.solver.name().into(),
                r.status.as_str().into(),
                c.fixed.to_string(),
                c.operational.to_string(),
                c.penalty.to_string(),
                c.migration.to_string(),
                c.hardware.to_string(),
                c.total.to_string(),
                if record_wall_time {
                    format!("{:.3}", r.wall_time.as_secs_f64() * 1e3)
                } else {
                    String::new()
                },
                r.cost_ratio.map(|x| format!("{x:.6}")).unwrap_or_default(),
            ]
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    WallMs,
    CostRatio,
    Total,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::WallMs => "wall_ms",
            Metric::CostRatio => "cost_ratio",
            Metric::Total => "total",
        }
    }

    fn of(self, r: &ExperimentResult) -> Option<f64> {
        match self {
            Metric::WallMs => Some(r.wall_time.as_secs_f64() * 1e3),
            Metric::CostRatio => r.cost_ratio,
            Metric::Total => Some(r.cost.total.as_units_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub axis_value: usize,
    pub solver: String,
    pub metric: Metric,
    pub stats: Stats,
}

/// Per (axis value, solver) statistics of `metric`, in first-seen order.
/// Groups without any sample are absent.
pub fn summarize(results: &[ExperimentResult], metric: Metric) -> Vec<GroupStats> {
    let mut keys: Vec<(usize, SolverKind)> = Vec::new();
    for r in results {
        if !keys.contains(&(r.axis_value, r.solver)) {
            keys.push((r.axis_value, r.solver));
        }
    }
    keys.into_iter()
        .filter_map(|(v, s)| {
            let xs: Vec<f64> = results
                .iter()
                .filter(|r| r.axis_value == v && r.solver == s)
                .filter_map(|r| metric.of(r))
                .collect();
            Stats::from_samples(&xs).map(|stats| GroupStats {
                axis_value: v,
                solver: s.name().into(),
                metric,
                stats,
            })
        })
        .collect()
}

/// `summary.csv`; undefined spreads are written as `NA`.
pub fn summary_csv(groups: &[GroupStats]) -> Vec<u8> {
    let na = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "NA".into());
    csv_bytes(
        &["axis", "solver", "metric", "count", "mean", "std", "ci_low", "ci_high"],
        groups.iter().map(|g| {
            let ci = g.stats.ci();
            vec![
                g.axis_value.to_string(),
                g.solver.clone(),
                g.metric.name().into(),
                g.stats.count.to_string(),
                format!("{:.6}", g.stats.mean),
                na(g.stats.std),
                na(ci.map(|c| c.0)),
                na(ci.map(|c| c.1)),
            ]
        }),
    )
}
