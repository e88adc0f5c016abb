//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any unexpected failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use dcpsp_core::exact::{brute_force, build_milp, export_mps, solve, BruteForceGuard, SolveLimits, SolveStatus};
use dcpsp_core::harness::{median, results_csv, run_experiment, slope, Axis, ExperimentConfig, ExperimentResult, SolverKind};
use dcpsp_core::heuristic::{self, Strategy};
use dcpsp_core::model::{compute_migrations, validate, ConstraintTag, Scenario, Solution};
use dcpsp_core::scenario::{generate, tiny_scenario, write_scenario, write_solution, GeneratorParams, TinyLimits};
use dcpsp_core::Money;

const ORACLE_SEEDS: u64 = 250;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);
const SWEEP_SEEDS: u64 = 30;
const SWEEP_LOCATIONS: usize = 6;
const SWEEP_SLOTS: [usize; 3] = [1, 2, 3];
const MAX_MEAN_HEU1_RATIO: f64 = 1.10;
const MIN_SPEEDUP: f64 = 100.0;
const SCALING_LOCATIONS: usize = 20;
const SCALING_SLOTS: [usize; 5] = [1, 2, 3, 4, 5];
/// Log-log slope of heuristic time against T; 1 is linear.
const MAX_SCALING_EXPONENT: f64 = 1.3;
const SCALING_BUDGET: Duration = Duration::from_secs(5);
const TRANSFER_SEEDS: u64 = 30;
const MPS_INSTANCES: u64 = 10;

/// Criteria whose failure is understood and documented in the README.
const KNOWN_RED: &[u32] = &[5];

struct Outcome {
    id: u32,
    name: &'static str,
    /// `None`: skipped (environment-gated).
    passed: Option<bool>,
    detail: String,
}

fn oracle_limits() -> SolveLimits {
    SolveLimits {
        time_budget: Duration::from_secs(60),
        node_budget: u64::MAX,
    }
}

struct OracleCase {
    scenario: Scenario,
    exact: Solution,
    values: Vec<i64>,
    exact_obj: Money,
    brute_obj: Money,
    brute: Solution,
    wall: Duration,
}

fn oracle_suite() -> Vec<OracleCase> {
    let tl = TinyLimits::default();
    (0..ORACLE_SEEDS)
        .map(|seed| {
            let scenario = tiny_scenario(seed, &tl);
            let started = Instant::now();
            let r = solve(&build_milp(&scenario), &oracle_limits());
            let wall = started.elapsed();
            assert_eq!(r.status, SolveStatus::Optimal, "seed {seed}");
            let b = brute_force(&scenario, &BruteForceGuard::default()).expect("tiny instances fit the guard");
            OracleCase {
                exact: r.solution.unwrap(),
                values: r.values.unwrap(),
                exact_obj: r.objective.unwrap(),
                brute_obj: b.objective.unwrap(),
                brute: b.solution.unwrap(),
                wall,
                scenario,
            }
        })
        .collect()
}

fn oracle_equivalence(cases: &[OracleCase]) -> Outcome {
    let mismatches: Vec<usize> = (0..cases.len()).filter(|&i| cases[i].exact_obj != cases[i].brute_obj).collect();
    let worst = cases.iter().map(|c| c.wall).max().unwrap();
    Outcome {
        id: 1,
        name: "oracle equivalence",
        passed: Some(mismatches.is_empty() && worst < ORACLE_TIME_LIMIT),
        detail: format!(
            "{} instances, {} mismatches {:?}, slowest {:.3} s (limit {} s)",
            cases.len(),
            mismatches.len(),
            mismatches,
            worst.as_secs_f64(),
            ORACLE_TIME_LIMIT.as_secs()
        ),
    }
}

/// One deliberately broken solution per constraint family.
fn violating_cases() -> Vec<(ConstraintTag, Scenario, Solution)> {
    let base = two_site();
    let mut out = Vec::new();
    let mut push = |tag, sc: Scenario, edit: &dyn Fn(&mut Solution)| {
        let mut sol = Solution::all_penalty(&sc);
        edit(&mut sol);
        out.push((tag, sc, sol));
    };
    push(ConstraintTag::DemandCoverage, base.clone(), &|s| s.y_pen[1][1][0] = 3);
    push(ConstraintTag::CapacityLink, base.clone(), &|s| {
        s.x[0] = true;
        s.z[0] = 2;
        s.y[0][0][0][0] = 2;
        s.y[0][0][1][0] = 1;
    });
    push(ConstraintTag::CapacityUpper, base.clone(), &|s| s.z[1] = 1);
    let mut parts = base.parts().clone();
    parts.data_centers[1].k_min = 2;
    push(ConstraintTag::CapacityLower, Scenario::new(parts).unwrap(), &|s| {
        s.x[1] = true;
        s.z[1] = 1;
    });
    push(ConstraintTag::QosEligibility, base.clone(), &|s| {
        s.x[2] = true;
        s.z[2] = 1;
        s.y[2][0][0][0] = 1;
    });
    // 6 local units of s0: 240 Mbps down against 200.
    push(ConstraintTag::LanDown, base.clone(), &|s| {
        s.x[0] = true;
        s.z[0] = 6;
        s.y[0][0][0][0] = 6;
    });
    let mut parts = base.parts().clone();
    parts.user_clusters[0].lan_up = 20;
    push(ConstraintTag::LanUp, Scenario::new(parts).unwrap(), &|s| {
        s.x[0] = true;
        s.z[0] = 3;
        s.y[0][0][0][0] = 3;
    });
    // 6 remote units of s1 to u0: 120 Mbps each way over a 100 Mbps MAN.
    let remote_s1 = |s: &mut Solution| {
        s.x[2] = true;
        s.z[2] = 6;
        s.y[2][0][1][0] = 6;
    };
    let mut parts = base.parts().clone();
    parts.user_clusters[0].man_up = 1000;
    push(ConstraintTag::ManDown, Scenario::new(parts).unwrap(), &remote_s1);
    let mut parts = base.parts().clone();
    parts.user_clusters[0].man_down = 1000;
    push(ConstraintTag::ManUp, Scenario::new(parts).unwrap(), &remote_s1);
    out
}

fn validator_soundness(cases: &[OracleCase], sweep_rows: usize, extra: &[(Scenario, Solution)]) -> Outcome {
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let heu = [Strategy::Heu1, Strategy::heu2()].map(|s| heuristic::solve(&c.scenario, &s).unwrap().solution);
        for (k, sol) in [&c.exact, &c.brute, &heu[0], &heu[1]].into_iter().enumerate() {
            checked += 1;
            if !validate(&c.scenario, sol).unwrap().is_empty() {
                bad.push(format!("oracle {i} solver {k}"));
            }
        }
    }
    for (i, (sc, sol)) in extra.iter().enumerate() {
        checked += 1;
        if !validate(sc, sol).unwrap().is_empty() {
            bad.push(format!("transfer {i}"));
        }
    }
    let mut family_bad = Vec::new();
    let families = violating_cases();
    for (tag, sc, sol) in &families {
        let got: Vec<ConstraintTag> = validate(sc, sol).unwrap().into_iter().map(|v| v.tag).collect();
        if got != [*tag] {
            family_bad.push(format!("{tag}: got {got:?}"));
        }
    }
    // Sweep rows are validated inside run_experiment, which errors on a breach.
    Outcome {
        id: 2,
        name: "validator soundness",
        passed: Some(bad.is_empty() && family_bad.is_empty()),
        detail: format!(
            "{} emitted solutions clean ({} more inside the sweeps), {} infeasible {:?}; {}/{} violation families tagged exactly {:?}",
            checked - bad.len(),
            sweep_rows,
            bad.len(),
            bad,
            families.len() - family_bad.len(),
            families.len(),
            family_bad
        ),
    }
}

fn migration_tightness(cases: &[OracleCase]) -> Outcome {
    let mut compared = 0usize;
    let mut bad = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let model = build_milp(&c.scenario);
        let mig = model.migrations(&c.values);
        let sc = &c.scenario;
        for u in 0..sc.n_clusters() {
            for s in 0..sc.n_services() {
                for t in 0..sc.horizon() {
                    let slot = |t: usize| (0..sc.n_dcs()).map(|d| c.exact.y[d][u][s][t]).collect::<Vec<u32>>();
                    let prev = (t > 0).then(|| slot(t - 1));
                    let want = compute_migrations(prev.as_deref(), &slot(t)).unwrap();
                    for d in 0..sc.n_dcs() {
                        compared += 1;
                        if mig[d][u][s][t] != want[d] as i64 {
                            bad.push((i, d, u, s, t));
                        }
                    }
                }
            }
        }
    }
    Outcome {
        id: 3,
        name: "migration linearization tightness",
        passed: Some(bad.is_empty()),
        detail: format!("{compared} y_mig entries compared, {} differ {:?}", bad.len(), &bad[..bad.len().min(5)]),
    }
}

fn sweep_config() -> ExperimentConfig {
    ExperimentConfig {
        axis: Axis::TimeSlots,
        values: SWEEP_SLOTS.to_vec(),
        params: GeneratorParams {
            n_locations: SWEEP_LOCATIONS,
            remote_replaces_cloudlet: true,
            ..GeneratorParams::default()
        },
        seeds: (0..SWEEP_SEEDS).collect(),
        solvers: vec![SolverKind::Exact, SolverKind::Heu1, SolverKind::Heu2],
        time_budget_secs: 60.0,
        heu2_rho: Strategy::DEFAULT_RHO,
        warm_start: false,
        record_wall_time: true,
    }
}

fn cell<'a>(rows: &'a [ExperimentResult], t: usize, solver: SolverKind) -> impl Iterator<Item = &'a ExperimentResult> {
    rows.iter().filter(move |r| r.axis_value == t && r.solver == solver)
}

fn mean_ratio(rows: &[ExperimentResult], t: usize, solver: SolverKind) -> Option<f64> {
    let xs: Vec<f64> = cell(rows, t, solver).filter_map(|r| r.cost_ratio).collect();
    (xs.len() as u64 == SWEEP_SEEDS).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn heuristic_quality(rows: &[ExperimentResult]) -> Outcome {
    let means: Vec<Option<f64>> = SWEEP_SLOTS.iter().map(|&t| mean_ratio(rows, t, SolverKind::Heu1)).collect();
    let ok = means.iter().all(|m| m.is_some_and(|m| m <= MAX_MEAN_HEU1_RATIO));
    let trend = if means.windows(2).all(|w| w[0] <= w[1]) { "non-decreasing" } else { "not monotone" };
    let shown: Vec<String> = SWEEP_SLOTS
        .iter()
        .zip(&means)
        .map(|(t, m)| format!("T={t}: {}", m.map_or("n/a".into(), |m| format!("{m:.4}"))))
        .collect();
    Outcome {
        id: 4,
        name: "heuristic quality",
        passed: Some(ok),
        detail: format!(
            "mean HEU1 ratio {} (limit {MAX_MEAN_HEU1_RATIO}); trend in T {trend} (reported, not gated)",
            shown.join(", ")
        ),
    }
}

fn strategy_ordering(rows: &[ExperimentResult]) -> Outcome {
    let mut ok = true;
    let mut shown = Vec::new();
    for &t in &SWEEP_SLOTS {
        let (a, b) = (mean_ratio(rows, t, SolverKind::Heu1), mean_ratio(rows, t, SolverKind::Heu2));
        ok &= matches!((a, b), (Some(a), Some(b)) if a < b);
        let identical = cell(rows, t, SolverKind::Heu1)
            .zip(cell(rows, t, SolverKind::Heu2))
            .filter(|(x, y)| x.cost == y.cost)
            .count();
        shown.push(format!(
            "T={t}: HEU1 {} vs HEU2 {} ({identical}/{SWEEP_SEEDS} identical)",
            a.map_or("n/a".into(), |m| format!("{m:.4}")),
            b.map_or("n/a".into(), |m| format!("{m:.4}"))
        ));
    }
    // The cap can only change anything when it is below what the cloudlets
    // could supply in a slot.
    let (mut binding, mut total) = (0, 0);
    let cfg = sweep_config();
    for &t in &SWEEP_SLOTS {
        for &seed in &cfg.seeds {
            let mut p = cfg.params.clone();
            p.horizon = t;
            p.seed = seed;
            let sc = generate(&p).unwrap();
            let cloudlet_units: u32 = sc.data_centers().iter().filter(|d| d.is_cloudlet()).map(|d| d.k_max).sum();
            total += 1;
            if heuristic::heu2_cap(&sc, cfg.heu2_rho).unwrap() < cloudlet_units {
                binding += 1;
            }
        }
    }
    shown.push(format!("cap below total cloudlet capacity on {binding}/{total} instances"));
    Outcome {
        id: 5,
        name: "strategy ordering",
        passed: Some(ok),
        detail: shown.join("; "),
    }
}

fn walls(rows: &[ExperimentResult], t: usize, solver: SolverKind) -> Vec<f64> {
    cell(rows, t, solver).map(|r| r.wall_time.as_secs_f64()).collect()
}

fn speedup(rows: &[ExperimentResult]) -> Outcome {
    let t = *SWEEP_SLOTS.last().unwrap();
    let exact = median(&walls(rows, t, SolverKind::Exact)).unwrap();
    let h1 = median(&walls(rows, t, SolverKind::Heu1)).unwrap();
    let h2 = median(&walls(rows, t, SolverKind::Heu2)).unwrap();
    let ratio_ok = h1.max(h2) * MIN_SPEEDUP <= exact;

    // Heuristic scaling in T at full location count.
    let started = Instant::now();
    let mut med = Vec::new();
    for &t in &SCALING_SLOTS {
        let mut times = Vec::new();
        for seed in 0..SWEEP_SEEDS {
            let sc = generate(&GeneratorParams {
                n_locations: SCALING_LOCATIONS,
                horizon: t,
                seed,
                ..GeneratorParams::default()
            })
            .unwrap();
            for strategy in [Strategy::Heu1, Strategy::heu2()] {
                // Best of three damps scheduler noise.
                let best = (0..3)
                    .map(|_| {
                        let s = Instant::now();
                        let out = heuristic::solve(&sc, &strategy).unwrap();
                        let e = s.elapsed().as_secs_f64();
                        std::hint::black_box(out);
                        e
                    })
                    .fold(f64::INFINITY, f64::min);
                times.push(best);
            }
        }
        med.push(median(&times).unwrap());
    }
    let total = started.elapsed();
    let xs: Vec<f64> = SCALING_SLOTS.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = med.iter().map(|m| m.ln()).collect();
    let exponent = slope(&xs, &ys);
    let scaling_ok = exponent <= MAX_SCALING_EXPONENT && total < SCALING_BUDGET;
    Outcome {
        id: 6,
        name: "speedup",
        passed: Some(ratio_ok && scaling_ok),
        detail: format!(
            "T={t}: median exact {:.3} ms, HEU1 {:.4} ms, HEU2 {:.4} ms ({:.0}x, need {MIN_SPEEDUP}x); \
             locations={SCALING_LOCATIONS} medians {:?} ms, log-log slope {exponent:.3} (limit {MAX_SCALING_EXPONENT}), {:.2} s total",
            exact * 1e3,
            h1 * 1e3,
            h2 * 1e3,
            exact / h1.max(h2),
            med.iter().map(|m| (m * 1e6).round() / 1e3).collect::<Vec<_>>(),
            total.as_secs_f64()
        ),
    }
}

fn determinism() -> Outcome {
    let mut problems = Vec::new();
    for seed in 0..5 {
        let p = GeneratorParams {
            n_locations: 6,
            remote_replaces_cloudlet: true,
            horizon: 2,
            seed,
            ..GeneratorParams::default()
        };
        let (a, b) = (generate(&p).unwrap(), generate(&p).unwrap());
        if write_scenario(&a) != write_scenario(&b) {
            problems.push(format!("scenario {seed}"));
        }
        for strategy in [Strategy::Heu1, Strategy::heu2()] {
            let s1 = heuristic::solve(&a, &strategy).unwrap().solution;
            let s2 = heuristic::solve(&b, &strategy).unwrap().solution;
            if write_solution(&s1) != write_solution(&s2) {
                problems.push(format!("{} {seed}", strategy.name()));
            }
        }
        let e = |sc: &Scenario| write_solution(&solve(&build_milp(sc), &oracle_limits()).solution.unwrap());
        if e(&a) != e(&b) {
            problems.push(format!("exact {seed}"));
        }
    }
    let mut cfg = sweep_config();
    cfg.values = vec![1, 2];
    cfg.seeds = (0..5).collect();
    cfg.warm_start = true;
    let r1 = run_experiment(&cfg).unwrap();
    let r2 = run_experiment(&cfg).unwrap();
    if results_csv(&r1, false) != results_csv(&r2, false) {
        problems.push("results.csv".into());
    }
    // With timing on, everything except wall_ms still agrees.
    let strip = |bytes: Vec<u8>| -> Vec<String> {
        String::from_utf8(bytes)
            .unwrap()
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(10);
                f.join(",")
            })
            .collect()
    };
    if strip(results_csv(&r1, true)) != strip(results_csv(&r2, true)) {
        problems.push("results.csv (timed)".into());
    }
    Outcome {
        id: 7,
        name: "determinism",
        passed: Some(problems.is_empty()),
        detail: format!(
            "5 scenarios, 15 solutions and a {}-row CSV compared; differences: {problems:?}",
            r1.len()
        ),
    }
}

fn transfer_property() -> (Outcome, Vec<(Scenario, Solution)>) {
    let mut bad = Vec::new();
    let mut kept = Vec::new();
    let mut nonzero_other = 0;
    for seed in 0..TRANSFER_SEEDS {
        let sc = generate(&GeneratorParams {
            n_locations: 10,
            horizon: 5,
            seed,
            max_amplitude: 0.0,
            noise_fraction: 0.0,
            cloudlet_capacity: (20, 20),
            router_mbps: 5_000,
            man_mbps: 20_000,
            ..GeneratorParams::default()
        })
        .unwrap();
        let sol = heuristic::solve(&sc, &Strategy::Heu1).unwrap().solution;
        let mut cost = [0i64; 3];
        for u in 0..sc.n_clusters() {
            for s in 0..sc.n_services() {
                for t in 1..sc.horizon() {
                    let slot = |t: usize| (0..sc.n_dcs()).map(|d| sol.y[d][u][s][t]).collect::<Vec<u32>>();
                    let m = compute_migrations(Some(&slot(t - 1)), &slot(t)).unwrap();
                    cost[s] += m.iter().map(|&v| v as i64).sum::<i64>() * sc.services()[s].c_mig.0;
                }
            }
        }
        if cost[0] != 0 || cost[1] != 0 {
            bad.push((seed, cost[0], cost[1]));
        }
        if cost[2] != 0 {
            nonzero_other += 1;
        }
        kept.push((sc, sol));
    }
    let outcome = Outcome {
        id: 8,
        name: "heuristic transfer property",
        passed: Some(bad.is_empty()),
        detail: format!(
            "{TRANSFER_SEEDS} constant-demand scenarios, services 1-2 migration nonzero on {} {:?} (service 3: {nonzero_other})",
            bad.len(),
            bad
        ),
    };
    (outcome, kept)
}

const HIGHS_SCRIPT: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.setOptionValue("mip_rel_gap", 0.0)
h.setOptionValue("mip_abs_gap", 0.0)
for path in sys.argv[1:]:
    st = h.readModel(path)
    if st != highspy.HighsStatus.kOk:
        print(path, "read", st)
        continue
    h.run()
    print(path, h.modelStatusToString(h.getModelStatus()), repr(h.getInfo().objective_function_value))
"#;

fn mps_cross_check(cases: &[OracleCase]) -> Outcome {
    let name = "MPS cross-check";
    let probe = std::process::Command::new("python3").args(["-c", "import highspy"]).output();
    if !probe.map(|o| o.status.success()).unwrap_or(false) {
        return Outcome {
            id: 9,
            name,
            passed: None,
            detail: "python3 with highspy not available".into(),
        };
    }
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (i, c) in cases.iter().take(MPS_INSTANCES as usize).enumerate() {
        let p = dir.path().join(format!("m{i}.mps"));
        std::fs::write(&p, export_mps(&build_milp(&c.scenario))).unwrap();
        paths.push(p);
    }
    let out = std::process::Command::new("python3")
        .arg("-c")
        .arg(HIGHS_SCRIPT)
        .args(&paths)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let mut bad = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    for (i, c) in cases.iter().take(MPS_INSTANCES as usize).enumerate() {
        let line = lines.get(i).copied().unwrap_or("");
        let f: Vec<&str> = line.split_whitespace().collect();
        let agrees = f.len() == 3
            && f[1] == "Optimal"
            && f[2].parse::<f64>().is_ok_and(|v| v.round() as i64 == c.exact_obj.0 && (v - v.round()).abs() < 1e-6);
        if !agrees {
            bad.push(format!("#{i}: {line:?} vs {}", c.exact_obj.0));
        }
    }
    Outcome {
        id: 9,
        name,
        passed: Some(out.status.success() && bad.is_empty()),
        detail: format!("HiGHS optimum equals ours on {}/{MPS_INSTANCES} exported models {bad:?}", MPS_INSTANCES as usize - bad.len()),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let oracle = oracle_suite();
    let sweep = run_experiment(&sweep_config()).expect("sweep runs and every solution validates");
    let (transfer, transfer_solutions) = transfer_property();
    let outcomes = vec![
        oracle_equivalence(&oracle),
        validator_soundness(&oracle, sweep.len(), &transfer_solutions),
        migration_tightness(&oracle),
        heuristic_quality(&sweep),
        strategy_ordering(&sweep),
        speedup(&sweep),
        determinism(),
        transfer,
        mps_cross_check(&oracle),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_RED.contains(&o.id);
        let tag = match (o.passed, known) {
            (None, _) => "SKIP",
            (Some(true), _) => "PASS",
            (Some(false), true) => "FAIL (known, see README)",
            (Some(false), false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {} {}: {tag} - {}", o.id, o.name, o.detail);
    }
    println!("acceptance finished in {:.1} s", started.elapsed().as_secs_f64());
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
