use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use dcpsp_core::exact::{build_milp, export_mps, solve_with_incumbent, SolveLimits};
use dcpsp_core::harness::{
    emit_chart, results_csv, run_experiment, summarize, summary_csv, ChartKind, ExperimentConfig, Metric,
};
use dcpsp_core::heuristic::{self, Strategy};
use dcpsp_core::model::{evaluate_cost, validate, Scenario};
use dcpsp_core::scenario::{generate, read_scenario, read_solution, write_scenario, write_solution, GeneratorParams};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NO_INCUMBENT: u8 = 3;

#[derive(Parser)]
#[command(name = "dcpsp", version, about = "Cloudlet placement and selection: generate, solve, check, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Heu1,
    Heu2,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic scenario.
    Generate {
        /// JSON file of generator parameters; missing fields take defaults.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        locations: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        services: Option<usize>,
        /// Put the remote cloud in place of the last cloudlet.
        #[arg(long)]
        remote_replaces_cloudlet: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a scenario and write the solution.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        solver: SolverArg,
        /// Exact solver budget, seconds.
        #[arg(long, default_value_t = 60.0)]
        time_budget: f64,
        /// Cloudlet cap fraction for heu2.
        #[arg(long, default_value_t = Strategy::DEFAULT_RHO)]
        rho: f64,
        /// Do not seed the exact search with the heu1 solution.
        #[arg(long)]
        no_warm_start: bool,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution against every constraint.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Write the linearized model in fixed MPS format.
    ExportMps {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment sweep.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    read_scenario(&read(path)?).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            params,
            seed,
            locations,
            horizon,
            services,
            remote_replaces_cloudlet,
            out,
        } => {
            let mut p: GeneratorParams = match params {
                Some(path) => serde_json::from_slice(&read(&path)?)?,
                None => GeneratorParams::default(),
            };
            p.seed = seed;
            if let Some(n) = locations {
                p.n_locations = n;
            }
            if let Some(t) = horizon {
                p.horizon = t;
            }
            if let Some(s) = services {
                p.n_services = s;
            }
            p.remote_replaces_cloudlet |= remote_replaces_cloudlet;
            write(&out, &write_scenario(&generate(&p)?))
        }
        Command::Solve {
            scenario,
            solver,
            time_budget,
            rho,
            no_warm_start,
            out,
        } => {
            let sc = load_scenario(&scenario)?;
            let started = Instant::now();
            let (solution, status) = match solver {
                SolverArg::Heu1 => (heuristic::solve(&sc, &Strategy::Heu1)?.solution, "heuristic".to_string()),
                SolverArg::Heu2 => (heuristic::solve(&sc, &Strategy::Heu2 { rho })?.solution, "heuristic".to_string()),
                SolverArg::Exact => {
                    if !(time_budget > 0.0 && time_budget.is_finite()) {
                        return Err(Failure(EXIT_USAGE, "--time-budget must be positive".into()));
                    }
                    let start = (!no_warm_start).then(|| heuristic::solve(&sc, &Strategy::Heu1)).transpose()?;
                    let limits = SolveLimits {
                        time_budget: Duration::from_secs_f64(time_budget),
                        node_budget: u64::MAX,
                    };
                    let report = solve_with_incumbent(&build_milp(&sc), &limits, start.as_ref().map(|o| &o.solution));
                    match report.solution {
                        Some(s) => (s, format!("{} nodes={} bound={}", report.status, report.nodes, report.best_bound)),
                        None => return Err(Failure(EXIT_NO_INCUMBENT, format!("no incumbent ({})", report.status))),
                    }
                }
            };
            let wall = started.elapsed();
            let cost = evaluate_cost(&sc, &solution)?;
            eprintln!(
                "status={status} total={} fixed={} operational={} penalty={} migration={} hardware={} wall_ms={:.3}",
                cost.total,
                cost.fixed,
                cost.operational,
                cost.penalty,
                cost.migration,
                cost.hardware,
                wall.as_secs_f64() * 1e3
            );
            let bytes = write_solution(&solution);
            match out {
                Some(path) => write(&path, &bytes),
                None => {
                    print!("{}", String::from_utf8_lossy(&bytes));
                    Ok(())
                }
            }
        }
        Command::Validate { scenario, solution } => {
            let sc = load_scenario(&scenario)?;
            let sol = read_solution(&read(&solution)?, &sc)
                .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", solution.display())))?;
            let violations = validate(&sc, &sol)?;
            if violations.is_empty() {
                println!("ok total={}", evaluate_cost(&sc, &sol)?.total);
                Ok(())
            } else {
                for v in &violations {
                    println!("{} {:?} slack={}", v.tag, v.indices, v.slack);
                }
                Err(Failure(EXIT_INVALID, format!("{} violated constraint(s)", violations.len())))
            }
        }
        Command::ExportMps { scenario, out } => write(&out, &export_mps(&build_milp(&load_scenario(&scenario)?))),
        Command::Bench { config, out_dir } => {
            let cfg: ExperimentConfig = serde_json::from_slice(&read(&config)?)?;
            cfg.validate()?;
            let results = run_experiment(&cfg).map_err(|e| {
                let code = match e {
                    dcpsp_core::harness::ExperimentError::ContractBreach { .. } => EXIT_INVALID,
                    _ => EXIT_USAGE,
                };
                Failure(code, e.to_string())
            })?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", out_dir.display())))?;
            let times = summarize(&results, Metric::WallMs);
            let ratios = summarize(&results, Metric::CostRatio);
            let mut groups = times.clone();
            groups.extend(ratios.iter().cloned());
            if !cfg.record_wall_time {
                groups.retain(|g| g.metric != Metric::WallMs);
            }
            write(&out_dir.join("results.csv"), &results_csv(&results, cfg.record_wall_time))?;
            write(&out_dir.join("summary.csv"), &summary_csv(&groups))?;
            write(&out_dir.join("runtime.svg"), &emit_chart(&times, ChartKind::RuntimeLog))?;
            write(&out_dir.join("cost_ratio.svg"), &emit_chart(&ratios, ChartKind::CostRatio))?;
            eprintln!("{} rows written to {}", results.len(), out_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
